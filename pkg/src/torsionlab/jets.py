"""Second-order jet evaluation of scalar fields and its finite-difference oracle."""

from dataclasses import dataclass

import numpy as np

from . import backend
from ._tape import ERR_REASON, compile_ast
from .errors import EvalDomainError
from .exprparse import to_source


@dataclass
class Jet2:
    """Value, gradient and (exactly symmetric) Hessian at one point."""

    value: float
    grad: np.ndarray
    hess: np.ndarray


def get_tape(field):
    if field._tape is None:
        field._tape = compile_ast(field.ast, field.chart.dim)
    return field._tape


def _run_tape(tape, points, eval_fn=None):
    """Execute a tape over an (N, D) batch; returns all register values plus
    final-slot gradients and Hessians. Raises EvalDomainError on a guard trip."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != tape.dim:
        raise ValueError(f"points must have shape (N, {tape.dim})")
    N = points.shape[0]
    n = tape.n
    val_regs = np.empty((n, N))
    grad = np.empty((N, tape.dim))
    hess = np.empty((N, tape.dim, tape.dim))
    fn = eval_fn if eval_fn is not None else backend.eval_tape
    err = fn(tape.code, tape.aux, points, val_regs, grad, hess)
    if err is not None:
        errcode, instr, pt = err
        raise EvalDomainError(ERR_REASON[errcode], to_source(tape.nodes[instr]),
                              point=points[pt])
    return val_regs, grad, hess


def eval_jet2_many(field, points):
    """Evaluate a field with exact first and second derivatives at many points.

    Returns ``(values (N,), grads (N, D), hessians (N, D, D))``.
    """
    tape = get_tape(field)
    val_regs, grad, hess = _run_tape(tape, points)
    return val_regs[-1].copy(), grad, hess


def eval_jet2(field, point):
    """Single-point jet of a field; see eval_jet2_many."""
    v, g, h = eval_jet2_many(field, np.asarray(point, dtype=float).reshape(1, -1))
    return Jet2(float(v[0]), g[0], h[0])


def eval_values(field, points):
    """Values only (jets still computed; convenience for oracles)."""
    return eval_jet2_many(field, points)[0]


def _stencil(point, step):
    """Center plus x +- step e_mu and x +- 2 step e_mu for every axis."""
    point = np.asarray(point, dtype=float)
    D = point.shape[0]
    pts = [point]
    for mu in range(D):
        for c in (step, -step, 2.0 * step, -2.0 * step):
            q = point.copy()
            q[mu] += c
            pts.append(q)
    return np.array(pts)


def fd_check(field, point, step):
    """Max deviation between jet derivatives and central finite differences.

    Gradients are checked against second-order central differences of values.
    Hessian entries are checked against central differences of the exact jet
    gradient (a plain value stencil cannot resolve second derivatives below
    ~1e-6 in binary64, which would drown the comparison).

    Raises EvalDomainError if any stencil point fails to evaluate, or if a
    divisor / log / sqrt / fractional-power argument changes sign across the
    stencil -- the stencil then brackets a singularity even though each point
    evaluates on its own.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    tape = get_tape(field)
    pts = _stencil(point, step)
    val_regs, grads, _ = _run_tape(tape, pts)
    for slot, instr in tape.guarded_slots():
        vals = val_regs[slot]
        if vals.min() < 0.0 < vals.max():
            raise EvalDomainError("stencil crosses a singularity",
                                  to_source(tape.nodes[instr]), point=np.asarray(point, float))

    center = eval_jet2(field, point)
    D = len(center.grad)
    values = val_regs[-1]
    resid = 0.0
    for mu in range(D):
        base = 1 + 4 * mu
        f_p, f_m = values[base], values[base + 1]
        grad_fd = (f_p - f_m) / (2.0 * step)
        resid = max(resid, abs(center.grad[mu] - grad_fd))
        hess_fd = (grads[base] - grads[base + 1]) / (2.0 * step)
        resid = max(resid, float(np.max(np.abs(center.hess[mu] - hess_fd))))
    return resid
