"""Tetrad fields, pointwise frame data, the translation gauge potential,
and the built-in tetrad catalog with its JSON interchange format.

Index conventions used throughout the package (derivative axes always last):

* ``h_mat[a, mu]``          components h^a_mu (frame row, coordinate column)
* ``h_inv[a, mu]``          inverse frame h_a^mu, so ``h_inv[a, :] @ h_mat[:, b]``
  contracts correctly: sum_a h_a^rho h^a_nu = delta^rho_nu
* ``dh[a, mu, nu]``         d_nu h^a_mu
* ``ddh[a, mu, nu, sig]``   d_nu d_sig h^a_mu (symmetric in nu, sig)
* ``g[mu, nu]``             eta_ab h^a_mu h^b_nu
* ``dg[mu, nu, sig]``       d_sig g_munu

Frame indices are raised/lowered with eta = diag(signature), coordinate
indices with g.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .chart import Chart, lorentzian_chart
from .errors import SingularTetradError, TetradSpecError
from .exprparse import ScalarField, parse
from .jets import eval_jet2_many

_DET_FLOOR = 1e-12


class TetradField:
    """A chart plus a D x D matrix of scalar fields h^a_mu.

    Immutable after construction; all pointwise evaluation is pure.
    """

    def __init__(self, chart, fields, name="custom", params=None, domain=None):
        D = chart.dim
        if len(fields) != D or any(len(row) != D for row in fields):
            raise TetradSpecError(f"tetrad must be a {D}x{D} matrix of fields")
        self.chart = chart
        self.fields = [list(row) for row in fields]
        self.name = name
        self.params = dict(params or {})
        self.domain = dict(domain or {})
        for cname, (lo, hi) in self.domain.items():
            if cname not in chart.coord_names:
                raise TetradSpecError(f"domain names unknown coordinate {cname!r}")
            if not lo < hi:
                raise TetradSpecError(f"degenerate domain for {cname}: [{lo}, {hi}]")

    @property
    def dim(self):
        return self.chart.dim

    def domain_box(self):
        """(D, 2) array of [lo, hi] per coordinate; defaults to [-1, 1]."""
        box = np.tile(np.array([-1.0, 1.0]), (self.dim, 1))
        for cname, (lo, hi) in self.domain.items():
            box[self.chart.index(cname)] = (lo, hi)
        return box

    def __repr__(self):
        return f"TetradField({self.name!r}, dim={self.dim})"


@dataclass
class FramePointData:
    """Everything pointwise geometry needs about a tetrad at one point."""

    point: np.ndarray
    h_mat: np.ndarray     # h^a_mu
    h_inv: np.ndarray     # h_a^mu, indexed [a, mu]
    dh: np.ndarray        # d_nu h^a_mu, [a, mu, nu]
    ddh: np.ndarray       # [a, mu, nu, sig]
    dh_inv: np.ndarray    # d_nu h_a^mu, [a, mu, nu]
    g: np.ndarray
    g_inv: np.ndarray
    dg: np.ndarray        # [mu, nu, sig]
    ddg: np.ndarray       # [mu, nu, sig, tau]
    det_h: float
    eta: np.ndarray
    chart: Chart


@dataclass
class GaugePotential:
    """Translation gauge potential B^a_mu = h^a_mu - delta^a_mu at a point."""

    B: np.ndarray
    dB: np.ndarray        # [a, mu, nu] = d_nu B^a_mu = dh


def component_jets_many(tetrad, points):
    """Jets of all D*D tetrad components over an (N, D) batch.

    Returns ``(h (N,D,D), dh (N,D,D,D), ddh (N,D,D,D,D))`` in the index
    conventions of the module docstring.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(1, -1)
    N, D = points.shape
    h = np.empty((N, D, D))
    dh = np.empty((N, D, D, D))
    ddh = np.empty((N, D, D, D, D))
    for a in range(D):
        for mu in range(D):
            v, gr, he = eval_jet2_many(tetrad.fields[a][mu], points)
            h[:, a, mu] = v
            dh[:, a, mu] = gr
            ddh[:, a, mu] = he
    return h, dh, ddh


def frame_data_many(tetrad, points):
    """FramePointData for a batch of points (shared heavy lifting)."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(1, -1)
    h, dh, ddh = component_jets_many(tetrad, points)
    det = np.linalg.det(h)
    bad = np.abs(det) <= _DET_FLOOR
    if bad.any():
        i = int(np.argmax(bad))
        raise SingularTetradError(det[i], point=points[i])
    # inv(h)[mu, a] satisfies h^a_mu h_b^mu = delta; transpose to [a, mu]
    h_inv = np.linalg.inv(h).transpose(0, 2, 1)
    eta = tetrad.chart.eta()
    g = np.einsum("ab,nam,nbu->nmu", eta, h, h)
    g_inv = np.linalg.inv(g)
    dh_inv = -np.einsum("nar,nbrv,nbm->namv", h_inv, dh, h_inv)
    dg = (np.einsum("ab,nams,nbu->nmus", eta, dh, h)
          + np.einsum("ab,nam,nbus->nmus", eta, h, dh))
    ddg = (np.einsum("ab,namst,nbu->nmust", eta, ddh, h)
           + np.einsum("ab,nams,nbut->nmust", eta, dh, dh)
           + np.einsum("ab,namt,nbus->nmust", eta, dh, dh)
           + np.einsum("ab,nam,nbust->nmust", eta, h, ddh))
    out = []
    for i in range(len(points)):
        out.append(FramePointData(
            point=points[i].copy(), h_mat=h[i], h_inv=h_inv[i], dh=dh[i],
            ddh=ddh[i], dh_inv=dh_inv[i], g=g[i], g_inv=g_inv[i], dg=dg[i],
            ddg=ddg[i], det_h=float(det[i]), eta=eta, chart=tetrad.chart))
    return out


def frame_data_at(tetrad, point):
    """All pointwise frame blocks (h, inverse, metric, derivatives) at one point."""
    return frame_data_many(tetrad, np.asarray(point, float).reshape(1, -1))[0]


def gauge_potential_at(tetrad, point):
    """B = h - identity and its derivative, for frame-aligned tetrads.

    The split is only meaningful when frame labels ride along the chart's
    coordinate slots (all catalog tetrads are built that way); the caller is
    responsible for alignment on custom tetrads.
    """
    fd = frame_data_at(tetrad, point)
    B = fd.h_mat - np.eye(tetrad.dim)
    return GaugePotential(B=B, dB=fd.dh.copy())


# --- catalog ---------------------------------------------------------------

_THETA_MARGIN = 0.2

CATALOG_NAMES = ("minkowski", "minkowski_polar", "schwarzschild", "frw")


def _diag_tetrad(chart, exprs, name, params=None, domain=None, subexprs=None):
    D = chart.dim
    fields = [[parse("0", chart) for _ in range(D)] for _ in range(D)]
    numeric = {k: v for k, v in (params or {}).items() if not isinstance(v, str)}
    for i, text in enumerate(exprs):
        fields[i][i] = parse(text, chart, params=numeric, subexprs=subexprs)
    return TetradField(chart, fields, name=name, params=params, domain=domain)


def _require_param(params, key, name):
    if key not in params:
        raise TetradSpecError(f"catalog tetrad {name!r} requires parameter {key!r}")
    return params[key]


def catalog(name, params=None):
    """A built-in analytic tetrad.

    * ``minkowski``        identity tetrad on Cartesian coordinates
    * ``minkowski_polar``  diag(1, 1, r, r sin(theta)) on (t, r, theta, phi)
    * ``schwarzschild``    diag(sqrt(f), 1/sqrt(f), r, r sin(theta)),
      f = 1 - 2M/r; requires numeric parameter M
    * ``frw``              diag(1, a, a, a) on (t, x, y, z); requires the
      scale factor ``a`` as an expression string in t

    Sampling domains avoid the horizon (r >= 3M), the polar axis
    (theta in [0.2, pi - 0.2]) and the big-bang singularity (t >= 0.5).
    """
    params = dict(params or {})
    if name == "minkowski":
        ch = lorentzian_chart("t x y z")
        return _diag_tetrad(ch, ["1", "1", "1", "1"], name,
                            domain={c: (-1.0, 1.0) for c in ch.coord_names})
    if name == "minkowski_polar":
        ch = lorentzian_chart("t r theta phi")
        dom = {"t": (-1.0, 1.0), "r": (0.5, 3.0),
               "theta": (_THETA_MARGIN, math.pi - _THETA_MARGIN), "phi": (0.1, 6.18)}
        return _diag_tetrad(ch, ["1", "1", "r", "r*sin(theta)"], name, domain=dom)
    if name == "schwarzschild":
        M = float(_require_param(params, "M", name))
        if M <= 0:
            raise TetradSpecError("schwarzschild mass M must be positive")
        ch = lorentzian_chart("t r theta phi")
        dom = {"t": (-1.0, 1.0), "r": (3.0 * M, 20.0 * M),
               "theta": (_THETA_MARGIN, math.pi - _THETA_MARGIN), "phi": (0.1, 6.18)}
        return _diag_tetrad(
            ch, ["sqrt(1-2*M/r)", "1/sqrt(1-2*M/r)", "r", "r*sin(theta)"],
            name, params={"M": M}, domain=dom)
    if name == "frw":
        a_text = _require_param(params, "a", name)
        if not isinstance(a_text, str):
            raise TetradSpecError("frw scale factor 'a' must be an expression string")
        ch = lorentzian_chart("t x y z")
        a_ast = parse(a_text, ch).ast
        dom = {"t": (0.5, 3.0), "x": (-1.0, 1.0), "y": (-1.0, 1.0), "z": (-1.0, 1.0)}
        return _diag_tetrad(ch, ["1", "a", "a", "a"], name, params={"a": a_text},
                            domain=dom, subexprs={"a": a_ast})
    raise TetradSpecError(
        f"unknown catalog tetrad {name!r}; valid names: {', '.join(CATALOG_NAMES)}")


# --- JSON interchange ------------------------------------------------------

def tetrad_to_dict(tetrad):
    return {
        "name": tetrad.name,
        "dim": tetrad.dim,
        "coords": list(tetrad.chart.coord_names),
        "signature": list(tetrad.chart.signature),
        "params": dict(tetrad.params),
        "tetrad": [[f.source for f in row] for row in tetrad.fields],
        "domain": {c: list(tetrad.domain[c]) for c in tetrad.chart.coord_names
                   if c in tetrad.domain},
    }


def tetrad_from_dict(doc):
    try:
        coords = doc["coords"]
        signature = doc["signature"]
        dim = doc["dim"]
        rows = doc["tetrad"]
    except (KeyError, TypeError) as exc:
        raise TetradSpecError(f"tetrad spec missing field: {exc}") from None
    if dim != len(coords):
        raise TetradSpecError("'dim' does not match the number of coordinates")
    chart = Chart(tuple(coords), tuple(signature))
    params = dict(doc.get("params", {}))
    numeric = {k: float(v) for k, v in params.items() if not isinstance(v, str)}
    subexprs = {}
    for k, v in params.items():
        if isinstance(v, str):
            subexprs[k] = parse(v, chart, params=numeric).ast
    fields = []
    for a, row in enumerate(rows):
        if len(row) != dim:
            raise TetradSpecError(f"tetrad row {a} must have {dim} entries")
        fields.append([parse(text, chart, params=numeric, subexprs=subexprs)
                       for text in row])
    domain = {k: (float(v[0]), float(v[1])) for k, v in doc.get("domain", {}).items()}
    return TetradField(chart, fields, name=doc.get("name", "custom"),
                       params=params, domain=domain)


def dumps_tetrad(tetrad):
    """Canonical JSON bytes; loading and re-saving reproduces them exactly."""
    return (json.dumps(tetrad_to_dict(tetrad), indent=2) + "\n").encode()


def loads_tetrad(data):
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise TetradSpecError(f"invalid tetrad JSON: {exc}") from None
    return tetrad_from_dict(doc)


def save_tetrad(tetrad, path):
    with open(path, "wb") as fh:
        fh.write(dumps_tetrad(tetrad))


def load_tetrad(path):
    with open(path, "rb") as fh:
        return loads_tetrad(fh.read())
