"""Frame-basis sections, anchor map, structure functions, section bracket,
anholonomy, local-translation gauge transformations and the pair groupoid.

Sections live in the frame basis D_a (components X^a as scalar fields); the
anchor converts them to coordinate vector fields through h_a^mu. The bracket
of sections is

    [u, v]^c = -u^a v^b T^c_ab + u^a h_a^mu d_mu v^c - v^a h_a^mu d_mu u^c

with the frame torsion components T^c_ab as structure functions. All section
derivatives come from the same jet engine as the tetrads; no finite
differences enter these paths.
"""

from dataclasses import dataclass

import numpy as np

from .errors import TetradSpecError
from .exprparse import Add, Mul, Num, ScalarField, differentiate
from .jets import eval_jet2_many
from .telegeom import torsion_at
from .tetrad import TetradField


class Section:
    """Algebroid section: D scalar-field components on a shared chart."""

    def __init__(self, components):
        components = list(components)
        if not components:
            raise TetradSpecError("section needs at least one component")
        chart = components[0].chart
        if any(c.chart is not chart and c.chart != chart for c in components):
            raise TetradSpecError("section components must share one chart")
        if len(components) != chart.dim:
            raise TetradSpecError(
                f"section needs {chart.dim} components, got {len(components)}")
        self.chart = chart
        self.components = components

    def jets_at(self, point):
        """(values (D,), grads (D, D), hessians (D, D, D)) of all components."""
        D = self.chart.dim
        pt = np.asarray(point, dtype=float).reshape(1, -1)
        val = np.empty(D)
        grad = np.empty((D, D))
        hess = np.empty((D, D, D))
        for a, comp in enumerate(self.components):
            v, g, h = eval_jet2_many(comp, pt)
            val[a], grad[a], hess[a] = v[0], g[0], h[0]
        return val, grad, hess

    def values_at(self, point):
        return self.jets_at(point)[0]


def constant_section(chart, values):
    return Section([ScalarField(chart, Num(float(v)), {}) for v in values])


@dataclass
class StructureFunctions:
    """Position-dependent structure functions T^c_ab closing the D_a bracket."""

    Tc: np.ndarray        # [c, a, b], antisymmetric in (a, b)


def structure_functions_at(fd, td=None):
    """Frame components of the torsion, T^c_ab = h_a^mu h_b^nu h^c_rho T^rho_munu."""
    if td is None:
        td = torsion_at(fd)
    T_cf = np.einsum("cr,rmn->cmn", fd.h_mat, td.T_coord)
    Tc = np.einsum("am,bn,cmn->cab", fd.h_inv, fd.h_inv, T_cf)
    Tc = 0.5 * (Tc - Tc.transpose(0, 2, 1))    # antisymmetry exact, not just to rounding
    return StructureFunctions(Tc=Tc)


def _structure_functions_with_grad(fd):
    """(T^c_ab, d_sig T^c_ab) from the frame-torsion form; exact jets only."""
    Tf = fd.dh.transpose(0, 2, 1) - fd.dh                      # T^c(frame)_{mu nu}
    dTf = np.einsum("cnms->cmns", fd.ddh) - fd.ddh             # d_sig T^c_{mu nu}
    Tc = np.einsum("am,bn,cmn->cab", fd.h_inv, fd.h_inv, Tf)
    dTc = (np.einsum("ams,bn,cmn->cabs", fd.dh_inv, fd.h_inv, Tf)
           + np.einsum("am,bns,cmn->cabs", fd.h_inv, fd.dh_inv, Tf)
           + np.einsum("am,bn,cmns->cabs", fd.h_inv, fd.h_inv, dTf))
    return Tc, dTc


def anchor_apply(u, fd):
    """Coordinate components of the anchored section, X^mu = u^a h_a^mu."""
    vals = u.values_at(fd.point)
    return np.einsum("a,am->m", vals, fd.h_inv)


def _bracket_arrays(u_val, u_grad, v_val, v_grad, h_inv, Tc):
    """Bracket components from pointwise (value, gradient) data."""
    structure = -np.einsum("a,b,cab->c", u_val, v_val, Tc)
    deriv = (np.einsum("a,am,cm->c", u_val, h_inv, v_grad)
             - np.einsum("a,am,cm->c", v_val, h_inv, u_grad))
    return structure + deriv


def bracket_sections(u, v, point, fd, sf=None):
    """[u, v]_E at a point: structure-function term plus derivative terms."""
    if sf is None:
        sf = structure_functions_at(fd)
    u_val, u_grad, _ = u.jets_at(point)
    v_val, v_grad, _ = v.jets_at(point)
    return _bracket_arrays(u_val, u_grad, v_val, v_grad, fd.h_inv, sf.Tc)


def bracket_with_grad(u, v, point, fd):
    """Bracket value and its coordinate gradient (for nested brackets).

    The gradient is assembled from exact jets of the sections (to second
    order) and of the tetrad, so the Jacobi cyclic sum can be evaluated
    without finite differences.
    """
    u_val, u_grad, u_hess = u.jets_at(point)
    v_val, v_grad, v_hess = v.jets_at(point)
    Tc, dTc = _structure_functions_with_grad(fd)
    val = _bracket_arrays(u_val, u_grad, v_val, v_grad, fd.h_inv, Tc)
    grad = (
        -np.einsum("as,b,cab->cs", u_grad, v_val, Tc)
        - np.einsum("a,bs,cab->cs", u_val, v_grad, Tc)
        - np.einsum("a,b,cabs->cs", u_val, v_val, dTc)
        + np.einsum("as,am,cm->cs", u_grad, fd.h_inv, v_grad)
        + np.einsum("a,ams,cm->cs", u_val, fd.dh_inv, v_grad)
        + np.einsum("a,am,cms->cs", u_val, fd.h_inv, v_hess)
        - np.einsum("as,am,cm->cs", v_grad, fd.h_inv, u_grad)
        - np.einsum("a,ams,cm->cs", v_val, fd.dh_inv, u_grad)
        - np.einsum("a,am,cms->cs", v_val, fd.h_inv, u_hess)
    )
    return val, grad


def jacobi_residual(u, v, w, point, fd):
    """Max-norm of the cyclic sum [[u,v],w] + [[v,w],u] + [[w,u],v]."""
    Tc, _ = _structure_functions_with_grad(fd)
    jets = {s: s.jets_at(point) for s in (u, v, w)}
    total = np.zeros(fd.chart.dim)
    for s1, s2, s3 in ((u, v, w), (v, w, u), (w, u, v)):
        b_val, b_grad = bracket_with_grad(s1, s2, point, fd)
        w_val, w_grad, _ = jets[s3]
        total += _bracket_arrays(b_val, b_grad, w_val, w_grad, fd.h_inv, Tc)
    return float(np.max(np.abs(total)))


def anchor_homomorphism_residual(u, v, point, fd):
    """max |rho([u,v]) - [rho(u), rho(v)]| with the coordinate Lie bracket."""
    u_val, u_grad, _ = u.jets_at(point)
    v_val, v_grad, _ = v.jets_at(point)
    # anchored fields and their coordinate derivatives
    X = np.einsum("a,am->m", u_val, fd.h_inv)
    Y = np.einsum("a,am->m", v_val, fd.h_inv)
    dX = np.einsum("an,am->mn", u_grad, fd.h_inv) + np.einsum("a,amn->mn", u_val, fd.dh_inv)
    dY = np.einsum("an,am->mn", v_grad, fd.h_inv) + np.einsum("a,amn->mn", v_val, fd.dh_inv)
    coord_bracket = dY @ X - dX @ Y
    lhs = np.einsum("c,cm->m", bracket_sections(u, v, point, fd), fd.h_inv)
    return float(np.max(np.abs(lhs - coord_bracket)))


def multiply_section(f, v):
    """Section with components f * v^c (exact AST product)."""
    params = dict(f.params)
    comps = []
    for c in v.components:
        params_c = dict(params)
        params_c.update(c.params)
        comps.append(ScalarField(v.chart, Mul(f.ast, c.ast), params_c))
    return Section(comps)


def leibniz_residual(u, v, f, point, fd):
    """max-norm of [u, f v] - f [u, v] - (rho(u) f) v at a point."""
    sf = structure_functions_at(fd)
    fv = multiply_section(f, v)
    lhs = bracket_sections(u, fv, point, fd, sf)
    f_val, f_grad, _hess = _field_jets(f, point)
    uv = bracket_sections(u, v, point, fd, sf)
    u_val = u.values_at(point)
    rho_u_f = float(np.einsum("a,am,m->", u_val, fd.h_inv, f_grad))
    rhs = f_val * uv + rho_u_f * v.values_at(point)
    return float(np.max(np.abs(lhs - rhs)))


def _field_jets(field, point):
    v, g, h = eval_jet2_many(field, np.asarray(point, float).reshape(1, -1))
    return float(v[0]), g[0], h[0]


def anholonomy_at(fd):
    """Anholonomy coefficients f^c_ab of the frame vector fields h_a.

    Extracted from [h_a, h_b] = f^c_ab h_c; pointwise these equal minus the
    frame torsion components (verified by the suite, fixing the sign left
    open by the identification of torsion with anholonomy).
    """
    term = np.einsum("cn,am,bnm->cab", fd.h_mat, fd.h_inv, fd.dh_inv)
    return term - term.transpose(0, 2, 1)


def commutator_check(a, b, phi, point, fd, sf=None):
    """|(D_a D_b - D_b D_a) phi + T^c_ab D_c phi| with D_a = h_a^mu d_mu.

    The second derivative application goes through exact jets of phi.
    """
    if sf is None:
        sf = structure_functions_at(fd)
    _val, grad, hess = _field_jets(phi, point)
    # D_a D_b phi = h_a^mu d_mu (h_b^nu d_nu phi)
    second = (np.einsum("am,bnm,n->ab", fd.h_inv, fd.dh_inv, grad)
              + np.einsum("am,bn,mn->ab", fd.h_inv, fd.h_inv, hess))
    comm = second[a, b] - second[b, a]
    Dphi = fd.h_inv @ grad
    return float(abs(comm + np.einsum("c,c->", sf.Tc[:, a, b], Dphi)))


def gauge_transform(tetrad, eps):
    """Tetrad after the local translation x^a -> x^a + eps^a(x).

    The gauge potential shifts by dB^a_mu = d_mu eps^a, so the new tetrad is
    h'^a_mu = h^a_mu + d_mu eps^a with the derivative taken symbolically.
    Frame torsion is untouched by this shift (exactness of d eps).
    """
    D = tetrad.dim
    eps = list(eps)
    if len(eps) != D:
        raise TetradSpecError(f"need {D} translation components, got {len(eps)}")
    rows = []
    for a in range(D):
        row = []
        for mu in range(D):
            base = tetrad.fields[a][mu]
            dax = differentiate(eps[a].ast, mu)
            if isinstance(dax, Num) and dax.value == 0.0:
                row.append(base)
                continue
            params = dict(base.params)
            params.update(eps[a].params)
            row.append(ScalarField(tetrad.chart, Add(base.ast, dax), params))
        rows.append(row)
    return TetradField(tetrad.chart, rows, name=f"{tetrad.name}+translation",
                       params=tetrad.params, domain=tetrad.domain)


# --- pair groupoid ----------------------------------------------------------

@dataclass(frozen=True)
class PairGroupoidElement:
    """An arrow x -> y over a finite base: source and target identifiers."""

    source: object
    target: object


class PairGroupoid:
    """The groupoid base x base: arrows (x, y), composition by concatenation."""

    def __init__(self, base):
        self.base = frozenset(base)
        if not self.base:
            raise ValueError("pair groupoid needs a non-empty base")

    def element(self, source, target):
        if source not in self.base or target not in self.base:
            raise ValueError(f"({source!r}, {target!r}) not over base {sorted(self.base)!r}")
        return PairGroupoidElement(source, target)

    def elements(self):
        for x in sorted(self.base):
            for y in sorted(self.base):
                yield PairGroupoidElement(x, y)

    @staticmethod
    def identity(x):
        return PairGroupoidElement(x, x)

    @staticmethod
    def inverse(g):
        return PairGroupoidElement(g.target, g.source)


def groupoid_compose(g1, g2):
    """(x, y) then (y, z) gives (x, z); None when targets and sources mismatch.

    A failed composability condition is an expected outcome, not an error.
    """
    if g1.target != g2.source:
        return None
    return PairGroupoidElement(g1.source, g2.target)
