"""Pure-numpy tape evaluator: second-order jets, vectorized over points.

Fallback for the compiled extension; both implement the same contract (see
``backend.eval_tape``). Derivative rules propagate (value, gradient, Hessian)
through every instruction; Hessians stay exactly symmetric because every rule
is written symmetrically in the two derivative slots.
"""

import numpy as np

from ._tape import (
    ERR_DIV_ZERO,
    ERR_LOG_DOMAIN,
    ERR_POW_DOMAIN,
    ERR_SQRT_DOMAIN,
    ERR_TAN_POLE,
    OP_ADD,
    OP_CONST,
    OP_COORD,
    OP_COS,
    OP_COSH,
    OP_DIV,
    OP_EXP,
    OP_LOG,
    OP_MUL,
    OP_NEG,
    OP_POW,
    OP_SIN,
    OP_SINH,
    OP_SQRT,
    OP_SUB,
    OP_TAN,
)


def _first_true(mask):
    return int(np.argmax(mask))


def _outer(ga, gb):
    return ga[:, :, None] * gb[:, None, :]


def eval_tape(code, aux, points, val_regs, grad_out, hess_out):
    n = code.shape[0]
    N, D = points.shape
    val = val_regs
    grad = np.zeros((n, N, D))
    hess = np.zeros((n, N, D, D))

    for i in range(n):
        op, a, b = int(code[i, 0]), int(code[i, 1]), int(code[i, 2])
        if op == OP_CONST:
            val[i] = aux[i]
            grad[i] = 0.0
            hess[i] = 0.0
        elif op == OP_COORD:
            val[i] = points[:, a]
            grad[i] = 0.0
            grad[i, :, a] = 1.0
            hess[i] = 0.0
        elif op == OP_ADD:
            val[i] = val[a] + val[b]
            grad[i] = grad[a] + grad[b]
            hess[i] = hess[a] + hess[b]
        elif op == OP_SUB:
            val[i] = val[a] - val[b]
            grad[i] = grad[a] - grad[b]
            hess[i] = hess[a] - hess[b]
        elif op == OP_NEG:
            val[i] = -val[a]
            grad[i] = -grad[a]
            hess[i] = -hess[a]
        elif op == OP_MUL:
            va, vb = val[a], val[b]
            val[i] = va * vb
            grad[i] = va[:, None] * grad[b] + vb[:, None] * grad[a]
            hess[i] = (va[:, None, None] * hess[b] + vb[:, None, None] * hess[a]
                       + _outer(grad[a], grad[b]) + _outer(grad[b], grad[a]))
        elif op == OP_DIV:
            vb = val[b]
            bad = vb == 0.0
            if bad.any():
                return (ERR_DIV_ZERO, i, _first_true(bad))
            q = val[a] / vb
            gq = (grad[a] - q[:, None] * grad[b]) / vb[:, None]
            val[i] = q
            grad[i] = gq
            hess[i] = (hess[a] - q[:, None, None] * hess[b]
                       - _outer(gq, grad[b]) - _outer(grad[b], gq)) / vb[:, None, None]
        elif op == OP_POW:
            p = aux[i]
            u = val[a]
            if p == 0.0:
                val[i] = 1.0
                grad[i] = 0.0
                hess[i] = 0.0
            elif p == 1.0:
                val[i] = u
                grad[i] = grad[a]
                hess[i] = hess[a]
            else:
                if b == 1:   # integer exponent
                    if p < 0.0:
                        bad = u == 0.0
                        if bad.any():
                            return (ERR_POW_DOMAIN, i, _first_true(bad))
                else:
                    bad = u <= 0.0
                    if bad.any():
                        return (ERR_POW_DOMAIN, i, _first_true(bad))
                t2 = u ** (p - 2.0)
                t1 = t2 * u
                val[i] = t1 * u
                c1 = p * t1
                c2 = p * (p - 1.0) * t2
                grad[i] = c1[:, None] * grad[a]
                hess[i] = c1[:, None, None] * hess[a] + c2[:, None, None] * _outer(grad[a], grad[a])
        elif op == OP_SIN:
            s, c = np.sin(val[a]), np.cos(val[a])
            val[i] = s
            grad[i] = c[:, None] * grad[a]
            hess[i] = c[:, None, None] * hess[a] - s[:, None, None] * _outer(grad[a], grad[a])
        elif op == OP_COS:
            s, c = np.sin(val[a]), np.cos(val[a])
            val[i] = c
            grad[i] = -s[:, None] * grad[a]
            hess[i] = -s[:, None, None] * hess[a] - c[:, None, None] * _outer(grad[a], grad[a])
        elif op == OP_TAN:
            c = np.cos(val[a])
            bad = c == 0.0
            if bad.any():
                return (ERR_TAN_POLE, i, _first_true(bad))
            t = np.tan(val[a])
            d = 1.0 + t * t
            val[i] = t
            grad[i] = d[:, None] * grad[a]
            hess[i] = d[:, None, None] * hess[a] + (2.0 * t * d)[:, None, None] * _outer(grad[a], grad[a])
        elif op == OP_EXP:
            e = np.exp(val[a])
            val[i] = e
            grad[i] = e[:, None] * grad[a]
            hess[i] = e[:, None, None] * (hess[a] + _outer(grad[a], grad[a]))
        elif op == OP_LOG:
            u = val[a]
            bad = u <= 0.0
            if bad.any():
                return (ERR_LOG_DOMAIN, i, _first_true(bad))
            val[i] = np.log(u)
            grad[i] = grad[a] / u[:, None]
            hess[i] = hess[a] / u[:, None, None] - _outer(grad[a], grad[a]) / (u * u)[:, None, None]
        elif op == OP_SQRT:
            u = val[a]
            bad = u <= 0.0
            if bad.any():
                return (ERR_SQRT_DOMAIN, i, _first_true(bad))
            s = np.sqrt(u)
            val[i] = s
            grad[i] = grad[a] / (2.0 * s)[:, None]
            hess[i] = (hess[a] / (2.0 * s)[:, None, None]
                       - _outer(grad[a], grad[a]) / (4.0 * s * u)[:, None, None])
        elif op == OP_SINH:
            sh, ch = np.sinh(val[a]), np.cosh(val[a])
            val[i] = sh
            grad[i] = ch[:, None] * grad[a]
            hess[i] = ch[:, None, None] * hess[a] + sh[:, None, None] * _outer(grad[a], grad[a])
        elif op == OP_COSH:
            sh, ch = np.sinh(val[a]), np.cosh(val[a])
            val[i] = ch
            grad[i] = sh[:, None] * grad[a]
            hess[i] = sh[:, None, None] * hess[a] + ch[:, None, None] * _outer(grad[a], grad[a])
        else:
            raise ValueError(f"unknown opcode {op}")

    grad_out[:] = grad[n - 1]
    hess_out[:] = hess[n - 1]
    return None
