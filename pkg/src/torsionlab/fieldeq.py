"""Euler-Lagrange structure of the torsion-quadratic Lagrangian.

The density is treated as an algebraic function of the translation potential
and its first derivatives, L(B, dB), with h = 1 + B. Differentiating it in
those slots gives the conjugate momentum pi_a^{rho sig} = dL/d(d_sig B^a_rho)
and the energy-momentum current h j_a^rho = -dL/dB^a_rho; the raw
Euler-Lagrange residual

    E_a^rho = d_sig pi_a^{rho sig} - dL/dB^a_rho

vanishes on solutions independently of any overall normalization of L.

Two differentiation mechanisms are provided and cross-checked: exact
forward-mode sensitivities (CrossDual; the x-bank chains through B(x), dB(x)
so one pass also yields d_sig pi), and Richardson-extrapolated central
differences on the plain algebraic function.
"""

import numpy as np

from .errors import ConfigError
from .fwdual import CrossDual, contract, det, inverse
from .report import CheckRecord, Report, RIEMANN_SIGN, ARTIFACT_VERSION
from .tetrad import frame_data_at, frame_data_many
from .telegeom import christoffel_at, riemann_at, torsion_at


def potentials_at(fd):
    """(B, dB, ddB) of an aligned-frame tetrad at a point."""
    D = fd.chart.dim
    return fd.h_mat - np.eye(D), fd.dh, fd.ddh


def lagrangian_from_potentials(B, dB, eta, k=1.0):
    """Plain-array Lagrangian density from the potential slots.

    Same tensor algebra as telegeom.lagrangian_at but expressed in (B, dB);
    this is the function the difference-quotient mechanism probes.
    """
    D = B.shape[0]
    h = np.eye(D) + B
    hinv = np.linalg.inv(h)                       # [mu, a] = h_a^mu
    g = np.einsum("am,ab,bn->mn", h, eta, h)
    ginv = np.linalg.inv(g)
    Tf = dB.transpose(0, 2, 1) - dB
    Tc = np.einsum("ra,amn->rmn", hinv, Tf)
    Tlow = np.einsum("rs,smn->rmn", g, Tc)
    A = np.einsum("rb,mbn->mrn", ginv, Tlow)
    K = 0.5 * (np.einsum("mrn->rmn", A) + np.einsum("nrm->rmn", A) - Tc)
    trace = np.einsum("sms->m", Tc)
    V = ginv @ trace
    Klow = np.einsum("as,sbc->abc", g, K)
    Kup = np.einsum("ma,nb,rc,abc->mnr", ginv, ginv, ginv, Klow)
    S = (np.einsum("mnr->rmn", Kup) - np.einsum("rn,m->rmn", ginv, V)
         + np.einsum("rm,n->rmn", ginv, V))
    return float(np.linalg.det(h)) / (4.0 * k * k) * float(np.einsum("rmn,rmn->", S, Tlow))


def lagrangian_point_fn(eta, k=1.0):
    """The pure density function L(B, dB, point); the dependence on the point
    enters only through the slot values, so the argument is accepted for
    interface uniformity and otherwise unused."""
    def L(B, dB, point=None):
        return lagrangian_from_potentials(np.asarray(B, float),
                                          np.asarray(dB, float), eta, k)
    return L


def _cross_lagrangian(fd, k, with_x):
    """CrossDual Lagrangian with the z-bank on the 16 B + 64 dB slots and,
    optionally, the x-bank chained through the tetrad jets."""
    D = fd.chart.dim
    nB, ndB = D * D, D * D * D
    Q = nB + ndB
    P = D if with_x else 0
    B, dB, ddB = potentials_at(fd)

    Bz = np.zeros((D, D, Q))
    Bz.reshape(nB, Q)[:, :nB] = np.eye(nB)
    dBz = np.zeros((D, D, D, Q))
    dBz.reshape(ndB, Q)[:, nB:] = np.eye(ndB)
    Bx = fd.dh if with_x else np.zeros((D, D, 0))
    dBx = ddB if with_x else np.zeros((D, D, D, 0))

    B_cd = CrossDual(B.copy(), Bx.copy(), Bz, np.zeros((D, D, P, Q)))
    dB_cd = CrossDual(dB.copy(), dBx.copy(), dBz, np.zeros((D, D, D, P, Q)))
    eta_cd = CrossDual.constant(fd.eta, P, Q)

    h = B_cd + np.eye(D)
    hinv = inverse(h)                              # base [mu, a]
    etah = contract("ab,bm->am", eta_cd, h)
    g = contract("am,an->mn", h, etah)
    ginv = inverse(g)
    Tf = dB_cd.rearrange("amn->anm") - dB_cd
    Tc = contract("ra,amn->rmn", hinv, Tf)
    Tlow = contract("rs,smn->rmn", g, Tc)
    A = contract("rb,mbn->mrn", ginv, Tlow)
    K = (A.rearrange("mrn->rmn") + A.rearrange("nrm->rmn") - Tc).scaled(0.5)
    trace = Tc.rearrange("sms->m")
    V = contract("ma,a->m", ginv, trace)
    Klow = contract("as,sbc->abc", g, K)
    t1 = contract("ma,abc->mbc", ginv, Klow)
    t2 = contract("nb,mbc->mnc", ginv, t1)
    Kup = contract("rc,mnc->mnr", ginv, t2)
    S = (Kup.rearrange("mnr->rmn") - contract("rn,m->rmn", ginv, V)
         + contract("rm,n->rmn", ginv, V))
    SdotT = contract("rmn,rmn->", S, Tlow)
    return contract(",->", det(h), SdotT).scaled(1.0 / (4.0 * k * k))


def _slot_gradients(fd, k, with_x=False):
    D = fd.chart.dim
    nB = D * D
    L = _cross_lagrangian(fd, k, with_x)
    dLdB = L.dz[:nB].reshape(D, D)
    pi = L.dz[nB:].reshape(D, D, D)
    dpi = L.dxz[:, nB:].reshape(D, D, D, D) if with_x else None
    return dLdB, pi, dpi


def momentum_conjugate_at(tetrad, point, k=1.0, method="exact"):
    """Conjugate momentum pi_a^{rho sig} = dL/d(d_sig B^a_rho).

    ``method="exact"`` differentiates with forward sensitivities;
    ``method="difference"`` uses Richardson-extrapolated central differences
    on the plain density (the independent cross-check mechanism).
    """
    fd = frame_data_at(tetrad, point)
    if method == "exact":
        return _slot_gradients(fd, k)[1]
    if method == "difference":
        B, dB, _ = potentials_at(fd)
        return _fd_slot_gradient(B, dB, fd.eta, k, slot="dB")
    raise ConfigError(f"unknown differentiation method {method!r}")


def em_current_at(tetrad, point, k=1.0, method="exact"):
    """Gravitational energy-momentum current h j_a^rho = -dL/dB^a_rho."""
    fd = frame_data_at(tetrad, point)
    if method == "exact":
        return -_slot_gradients(fd, k)[0]
    if method == "difference":
        B, dB, _ = potentials_at(fd)
        return -_fd_slot_gradient(B, dB, fd.eta, k, slot="B")
    raise ConfigError(f"unknown differentiation method {method!r}")


def _fd_slot_gradient(B, dB, eta, k, slot, rel_step=1e-3):
    target = dB if slot == "dB" else B
    scale = 1.0 + float(np.max(np.abs(target)))
    out = np.empty_like(target)
    flat = out.reshape(-1)
    for q in range(flat.size):
        def probe(eps):
            Bp, dBp = B.copy(), dB.copy()
            (dBp if slot == "dB" else Bp).reshape(-1)[q] += eps
            return lagrangian_from_potentials(Bp, dBp, eta, k)

        def central(h):
            return (probe(h) - probe(-h)) / (2.0 * h)

        h = rel_step * scale
        flat[q] = (4.0 * central(h / 2) - central(h)) / 3.0
    return out


def field_eq_parts_at(tetrad, point, k=1.0):
    """All Euler-Lagrange pieces at a point.

    Returns a dict with ``momentum`` (pi), ``dLdB``, ``div_momentum``
    (d_sig pi_a^{rho sig} via chained sensitivities), ``residual``
    (the raw Euler-Lagrange expression) and ``scale`` (largest derivative
    term entering the balance, for relative comparisons).
    """
    fd = frame_data_at(tetrad, point)
    dLdB, pi, dpi = _slot_gradients(fd, k, with_x=True)
    div_pi = np.einsum("sars->ar", dpi)
    residual = div_pi - dLdB
    scale = max(float(np.max(np.abs(dpi))), float(np.max(np.abs(dLdB))))
    return {"momentum": pi, "dLdB": dLdB, "div_momentum": div_pi,
            "residual": residual, "scale": scale}


def field_eq_residual_at(tetrad, point, k=1.0):
    """Raw Euler-Lagrange residual E_a^rho = d_sig pi_a^{rho sig} - dL/dB^a_rho."""
    return field_eq_parts_at(tetrad, point, k)["residual"]


def momentum_divergence_fd(tetrad, point, k=1.0, step=1e-3):
    """Fallback divergence: five-point central differences of x -> pi(x),
    Richardson-extrapolated across two step sizes."""
    point = np.asarray(point, dtype=float)
    D = len(point)

    def pi_at(x):
        return momentum_conjugate_at(tetrad, x, k, method="exact")

    def five_point(h):
        dpi = np.empty((D, D, D, D))   # [sig, a, rho, tau]
        for s in range(D):
            e = np.zeros(D)
            e[s] = h
            dpi[s] = (-pi_at(point + 2 * e) + 8.0 * pi_at(point + e)
                      - 8.0 * pi_at(point - e) + pi_at(point - 2 * e)) / (12.0 * h)
        return dpi

    dpi = (16.0 * five_point(step / 2) - five_point(step)) / 15.0
    return np.einsum("sars->ar", dpi)


def measure_momentum_constant(tetrad, points, k=1.0):
    """Fit the single constant in pi_a^{rho sig} = c1 * det(h) * S_a^{rho sig}.

    Returns (c1, relative_spread, worst_relative_deviation) over every
    component above a small floor, across all supplied points.
    """
    ratios = []
    pis = []
    refs = []
    for fd in frame_data_many(tetrad, np.atleast_2d(points)):
        pi = _slot_gradients(fd, k)[1]
        ref = fd.det_h * torsion_at(fd).S_frame
        pis.append(pi)
        refs.append(ref)
    pis = np.array(pis)
    refs = np.array(refs)
    top = float(np.max(np.abs(refs)))
    if top == 0.0:
        return None, 0.0, float(np.max(np.abs(pis))) if pis.size else 0.0
    mask = np.abs(refs) > 1e-8 * top
    ratios = pis[mask] / refs[mask]
    c1 = float(np.median(ratios))
    spread = float((ratios.max() - ratios.min()) / abs(c1))
    worst = float(np.max(np.abs(pis - c1 * refs)) / top)
    return c1, spread, worst


def gr_equivalence_report(tetrad, points, k=1.0, vacuum=True,
                          tol_einstein=1e-8, tol_fieldeq=1e-6, floor=1e-2,
                          seed=None):
    """Tabulate |Einstein| and the field-equation residual point by point.

    On vacuum tetrads both must vanish together; with ``vacuum=False`` the
    residual must instead exceed ``floor`` (relative to the term scale),
    demonstrating the check has power against a source term.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    rows = []
    einstein_max = 0.0
    rels = []
    for x in points:
        fd = frame_data_at(tetrad, x)
        G = riemann_at(christoffel_at(fd), fd).einstein
        parts = field_eq_parts_at(tetrad, x, k)
        gmax = float(np.max(np.abs(G)))
        rel = (float(np.max(np.abs(parts["residual"]))) / parts["scale"]
               if parts["scale"] > 0 else 0.0)
        einstein_max = max(einstein_max, gmax)
        rels.append(rel)
        rows.append({"point": [float(v) for v in x],
                     "einstein_max": gmax, "fieldeq_rel_residual": rel})
    n = len(points)
    if vacuum:
        records = [
            CheckRecord("einstein_vacuum", n, einstein_max, tol_einstein),
            CheckRecord("field_equation", n, max(rels) if rels else 0.0, tol_fieldeq),
        ]
    else:
        records = [
            CheckRecord("field_equation_floor", n, min(rels) if rels else 0.0,
                        floor, mode="geq"),
        ]
    c1, spread, _ = measure_momentum_constant(tetrad, points[: min(n, 8)], k)
    conventions = {
        "signature": list(tetrad.chart.signature),
        "riemann_sign": RIEMANN_SIGN,
        "momentum_constant_c1": c1,
        "coupling_k": k,
    }
    return Report(tetrad_name=tetrad.name, tetrad_params=tetrad.params,
                  records=records, seed=seed, n_points=n,
                  conventions=conventions,
                  tables={"gr_equivalence": rows}, version=ARTIFACT_VERSION)
