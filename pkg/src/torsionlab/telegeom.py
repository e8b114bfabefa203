"""Connections, torsion, contortion, superpotential, curvature and the
torsion-quadratic Lagrangian density, all pointwise from FramePointData.

Conventions (see also tetrad module docstring):

* flat connection      gamma[rho, nu, mu] = h_a^rho d_mu h^a_nu
  (array slots mirror the symbol's slots; the derivative index is last)
* torsion              T_coord[rho, mu, nu] = gamma[rho, nu, mu] - gamma[rho, mu, nu]
                       T_frame[a, mu, nu]   = d_mu h^a_nu - d_nu h^a_mu
* contortion           K[rho, mu, nu] = (T_mu^rho_nu + T_nu^rho_mu - T^rho_munu)/2,
  indices moved with g; all-lowered K is antisymmetric in its first two slots
* superpotential       S[rho, mu, nu] = K^{mu nu rho} - g^{rho nu} t^mu
                       + g^{rho mu} t^nu  with t^mu the g-raised torsion trace
* curvature            R[rho, sig, mu, nu] = d_mu gamma[rho, sig, nu]
                       - d_nu gamma[rho, sig, mu]
                       + gamma[lam, sig, nu] gamma[rho, lam, mu]
                       - gamma[lam, sig, mu] gamma[rho, lam, nu]
  (the sign/slot choice that annihilates the flat connection; for the
  symmetric Levi-Civita connection it is the textbook Riemann tensor)

The flat-connection curvature vanishes identically and the decomposition
gamma = christoffel + K holds as an identity; both are verified numerically
by the check suite rather than assumed.
"""

from dataclasses import dataclass

import numpy as np

from .tetrad import frame_data_at, frame_data_many


@dataclass
class ConnectionCoeffs:
    gamma: np.ndarray     # [rho, nu, mu], derivative slot last
    dgamma: np.ndarray    # [rho, nu, mu, sig] = d_sig gamma[rho, nu, mu]
    kind: str             # "weitzenbock" | "christoffel"


@dataclass
class TorsionData:
    T_coord: np.ndarray   # T^rho_{mu nu}
    T_frame: np.ndarray   # T^a_{mu nu}
    T_low: np.ndarray     # T_{rho mu nu} = g_{rho sig} T^sig_{mu nu}
    K: np.ndarray         # K^rho_{mu nu}
    S: np.ndarray         # S^{rho mu nu}
    S_frame: np.ndarray   # S_a^{mu nu} = h_a^lam g_{lam nu} S^{nu mu ...}
    trace: np.ndarray     # t_mu = T^sig_{mu sig}


@dataclass
class CurvatureData:
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float = None
    einstein: np.ndarray = None


def weitzenbock_at(fd):
    """Flat tetrad connection h_a^rho d_mu h^a_nu and its first derivative."""
    gamma = np.einsum("ar,anm->rnm", fd.h_inv, fd.dh)
    dgamma = (np.einsum("ars,anm->rnms", fd.dh_inv, fd.dh)
              + np.einsum("ar,anms->rnms", fd.h_inv, fd.ddh))
    return ConnectionCoeffs(gamma=gamma, dgamma=dgamma, kind="weitzenbock")


def christoffel_at(fd):
    """Levi-Civita connection of the induced metric, symmetric lower slots."""
    # brace[s, m, n] = d_m g_sn + d_n g_sm - d_s g_mn, with dg[m, n, s] = d_s g_mn
    brace = (np.einsum("snm->smn", fd.dg) + fd.dg
             - np.einsum("mns->smn", fd.dg))
    gamma = 0.5 * np.einsum("rs,smn->rmn", fd.g_inv, brace)
    dginv = -np.einsum("ra,abt,bs->rst", fd.g_inv, fd.dg, fd.g_inv)
    dbrace = (np.einsum("snmt->smnt", fd.ddg) + fd.ddg
              - np.einsum("mnst->smnt", fd.ddg))
    dgamma = 0.5 * (np.einsum("rst,smn->rmnt", dginv, brace)
                    + np.einsum("rs,smnt->rmnt", fd.g_inv, dbrace))
    return ConnectionCoeffs(gamma=gamma, dgamma=dgamma, kind="christoffel")


def torsion_at(fd):
    """Torsion in both index forms plus contortion and superpotential."""
    gamma = np.einsum("ar,anm->rnm", fd.h_inv, fd.dh)
    T_coord = gamma.transpose(0, 2, 1) - gamma
    T_frame = fd.dh.transpose(0, 2, 1) - fd.dh
    T_low = np.einsum("rs,smn->rmn", fd.g, T_coord)
    # A[m, r, n] = T_mu^rho_nu (first slot lowered, middle raised back)
    A = np.einsum("rb,mbn->mrn", fd.g_inv, T_low)
    K = 0.5 * (A.transpose(1, 0, 2) + np.einsum("nrm->rmn", A) - T_coord)
    trace = np.einsum("sms->m", T_coord)
    V = fd.g_inv @ trace
    K_low = np.einsum("as,sbc->abc", fd.g, K)
    K_up = np.einsum("ma,nb,rc,abc->mnr", fd.g_inv, fd.g_inv, fd.g_inv, K_low)
    S = (np.einsum("mnr->rmn", K_up)
         - np.einsum("rn,m->rmn", fd.g_inv, V)
         + np.einsum("rm,n->rmn", fd.g_inv, V))
    S_frame = np.einsum("al,ln,nrs->ars", fd.h_inv, fd.g, S)
    return TorsionData(T_coord=T_coord, T_frame=T_frame, T_low=T_low, K=K, S=S,
                       S_frame=S_frame, trace=trace)


def decomposition_residual_at(fd):
    """max |flat connection - Levi-Civita - contortion| over all slots."""
    gamma = weitzenbock_at(fd).gamma
    chris = christoffel_at(fd).gamma
    K = torsion_at(fd).K
    return float(np.max(np.abs(gamma - chris - K)))


def riemann_at(conn, fd=None):
    """Curvature of a connection; Ricci always, scalar/Einstein only for the
    metric-compatible symmetric case (left unfilled for the flat connection)."""
    gamma, dgamma = conn.gamma, conn.dgamma
    dterm = dgamma.transpose(0, 1, 3, 2) - dgamma
    quad = np.einsum("lsn,rlm->rsmn", gamma, gamma)
    riemann = dterm + (quad - quad.transpose(0, 1, 3, 2))
    ricci = np.einsum("rsrn->sn", riemann)
    scalar = None
    einstein = None
    if fd is not None and conn.kind == "christoffel":
        scalar = float(np.einsum("sn,sn->", fd.g_inv, ricci))
        einstein = ricci - 0.5 * scalar * fd.g
    return CurvatureData(riemann=riemann, ricci=ricci, scalar=scalar,
                         einstein=einstein)


def lagrangian_at(fd, k=1.0):
    """Torsion-quadratic Lagrangian density, det(h)/(4 k^2) S^{rmn} T_rmn.

    The 1/(4 k^2) normalization is kept exactly as printed in the source
    material; it only rescales the density and the field equation
    homogeneously (see docs/conventions.md).
    """
    if k <= 0:
        raise ValueError("coupling k must be positive")
    td = torsion_at(fd)
    contraction = float(np.einsum("rmn,rmn->", td.S, td.T_low))
    return fd.det_h / (4.0 * k * k) * contraction


def flatness_residual_at(fd):
    """max |R(flat connection)| / (1 + max|gamma|^2), the scaled flatness check."""
    conn = weitzenbock_at(fd)
    R = riemann_at(conn).riemann
    gmax = float(np.max(np.abs(conn.gamma)))
    return float(np.max(np.abs(R))) / (1.0 + gmax * gmax)


def einstein_upper_at(tetrad, point):
    """Contravariant Einstein tensor G^{mu nu} from the Levi-Civita connection."""
    fd = frame_data_at(tetrad, point)
    G = riemann_at(christoffel_at(fd), fd).einstein
    return np.einsum("ma,nb,ab->mn", fd.g_inv, fd.g_inv, G)


def bianchi_divergence_residual(tetrad, point, step=1e-4):
    """Numerical contracted-Bianchi check: max_nu |nabla_mu G^{mu nu}|.

    The partial derivative of G^{mu nu} is taken by central differences of the
    exact-jet pipeline at neighboring points.
    """
    point = np.asarray(point, dtype=float)
    D = len(point)
    fd = frame_data_at(tetrad, point)
    chris = christoffel_at(fd).gamma
    Gup = einstein_upper_at(tetrad, point)
    dG = np.empty((D, D, D))   # [mu, nu, sig] = d_sig G^{mu nu}
    for s in range(D):
        e = np.zeros(D)
        e[s] = step
        dG[:, :, s] = (einstein_upper_at(tetrad, point + e)
                       - einstein_upper_at(tetrad, point - e)) / (2.0 * step)
    div = (np.einsum("mnm->n", dG)
           + np.einsum("mml,ln->n", chris, Gup)
           + np.einsum("nml,ml->n", chris, Gup))
    return float(np.max(np.abs(div)))


def torsion_many(tetrad, points):
    """TorsionData over a batch of points (convenience for the suite)."""
    return [torsion_at(fd) for fd in frame_data_many(tetrad, points)]
