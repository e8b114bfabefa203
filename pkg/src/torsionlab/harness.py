"""Identity-suite orchestration: seeded sampling, check registry, reports.

Every check is a pure function of precomputed frame data plus a seeded
random-field stream, records its max residual over the sampled points, and
never aborts the suite on a tolerance failure; the report collects one record
per check. Sampling uses numpy's PCG64 generator with the configured integer
seed, so reports are reproducible bit for bit.
"""

from dataclasses import dataclass, field

import numpy as np

from . import algebroid as alg
from . import fieldeq, telegeom
from .backend import BACKEND
from .errors import ConfigError
from .randfields import (random_expression, random_polynomial, random_section,
                         random_trig_poly)
from .report import ARTIFACT_VERSION, CheckRecord, Report, RIEMANN_SIGN, emit_report
from .tetrad import frame_data_many

__all__ = ["SuiteConfig", "sample_points", "run_suite", "emit_report",
           "CHECK_NAMES", "DEFAULT_TOLERANCES"]


def sample_points(box, n, seed):
    """n points uniform over the open box; deterministic for a fixed seed.

    ``box`` is a (D, 2) array of [lo, hi] rows. PRNG: numpy PCG64 seeded with
    the given integer; draws in [0, 1) are rejected at exactly 0 so points
    stay strictly interior.
    """
    box = np.asarray(box, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2:
        raise ConfigError("domain box must have shape (D, 2)")
    if np.any(box[:, 0] >= box[:, 1]):
        raise ConfigError("domain box has an empty or degenerate axis")
    if n < 1:
        raise ConfigError("number of sample points must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.random((n, box.shape[0]))
    while (u == 0.0).any():                       # keep points off the boundary
        u[u == 0.0] = rng.random(int((u == 0.0).sum()))
    return box[:, 0] + u * (box[:, 1] - box[:, 0])


DEFAULT_TOLERANCES = {
    "tetrad_inverses": 1e-12,
    "metric_symmetry": 1e-14,
    "metric_signature": 0.0,
    "flatness": 1e-9,
    "decomposition": 1e-10,
    "torsion_consistency": 1e-12,
    "gauge_potential_match": 0.0,
    "gauge_potential_reconstruction": 2.5e-16,
    "contortion_antisymmetry": 1e-12,
    "superpotential_antisymmetry": 1e-12,
    "anholonomy": 1e-10,
    "commutator": 1e-9,
    "anchor_homomorphism": 1e-9,
    "leibniz": 1e-9,
    "jacobi": 1e-8,
    "gauge_invariance": 1e-10,
    "einstein_symmetry": 1e-10,
    "bianchi_divergence": 1e-6,
    "momentum_proportionality": 1e-6,
    "field_equation": 1e-6,
    "field_equation_floor": 1e-2,
}


@dataclass
class SuiteConfig:
    tetrad: object
    seed: int = 2024
    n_points: int = 100
    tolerances: dict = field(default_factory=dict)
    checks: list = None
    non_vacuum: bool = False
    k: float = 1.0

    def tolerance(self, name):
        if name in self.tolerances:
            return self.tolerances[name]
        return DEFAULT_TOLERANCES[name]


class _Ctx:
    """Shared per-suite state handed to every check."""

    def __init__(self, cfg, points, fds):
        self.cfg = cfg
        self.tetrad = cfg.tetrad
        self.chart = cfg.tetrad.chart
        self.box = cfg.tetrad.domain_box()
        self.points = points
        self.fds = fds
        self.c1 = None

    def rng(self, salt):
        return np.random.default_rng([self.cfg.seed, salt])

    def subsample(self, n):
        step = max(1, len(self.points) // n)
        return self.points[::step][:n], self.fds[::step][:n]


def _check_tetrad_inverses(ctx, tol):
    worst = 0.0
    eye = np.eye(ctx.chart.dim)
    for fd in ctx.fds:
        c1 = np.einsum("am,an->mn", fd.h_inv, fd.h_mat) - eye
        c2 = np.einsum("am,bm->ab", fd.h_mat, fd.h_inv) - eye
        worst = max(worst, float(np.max(np.abs(c1))), float(np.max(np.abs(c2))))
    return CheckRecord("tetrad_inverses", len(ctx.fds), worst, tol)


def _check_metric_symmetry(ctx, tol):
    worst = max(float(np.max(np.abs(fd.g - fd.g.T))) for fd in ctx.fds)
    return CheckRecord("metric_symmetry", len(ctx.fds), worst, tol)


def _check_metric_signature(ctx, tol):
    expected = sum(1 for s in ctx.chart.signature if s > 0)
    bad = 0
    for fd in ctx.fds:
        npos = int(np.sum(np.linalg.eigvalsh(fd.g) > 0))
        if npos != expected:
            bad += 1
    return CheckRecord("metric_signature", len(ctx.fds), float(bad), tol)


def _check_flatness(ctx, tol):
    worst = max(telegeom.flatness_residual_at(fd) for fd in ctx.fds)
    return CheckRecord("flatness", len(ctx.fds), worst, tol)


def _check_decomposition(ctx, tol):
    worst = max(telegeom.decomposition_residual_at(fd) for fd in ctx.fds)
    return CheckRecord("decomposition", len(ctx.fds), worst, tol)


def _check_torsion_consistency(ctx, tol):
    worst = 0.0
    for fd in ctx.fds:
        td = telegeom.torsion_at(fd)
        via_frame = np.einsum("ar,amn->rmn", fd.h_inv, td.T_frame)
        worst = max(worst, float(np.max(np.abs(td.T_coord - via_frame))))
    return CheckRecord("torsion_consistency", len(ctx.fds), worst, tol)


def _check_gauge_potential_match(ctx, tol):
    """Torsion built from dB must equal torsion from dh bitwise (dB is dh)."""
    worst = 0.0
    for fd in ctx.fds:
        dB = fd.dh
        t_from_B = dB.transpose(0, 2, 1) - dB
        td = telegeom.torsion_at(fd)
        worst = max(worst, float(np.max(np.abs(t_from_B - td.T_frame))))
    return CheckRecord("gauge_potential_match", len(ctx.fds), worst, tol)


def _check_gauge_potential_reconstruction(ctx, tol):
    """B + identity must rebuild h to within one ulp.

    Bitwise equality is unattainable in binary64 for diagonal entries outside
    [1/2, 2]: (h - 1) + 1 can lose a half ulp (see docs/conventions.md).
    """
    worst = 0.0
    eye = np.eye(ctx.chart.dim)
    for fd in ctx.fds:
        B = fd.h_mat - eye
        err = np.abs((B + eye) - fd.h_mat) / np.maximum(1.0, np.abs(fd.h_mat))
        worst = max(worst, float(np.max(err)))
    return CheckRecord("gauge_potential_reconstruction", len(ctx.fds), worst, tol)


def _check_contortion_antisymmetry(ctx, tol):
    worst = 0.0
    for fd in ctx.fds:
        K_low = np.einsum("rs,smn->rmn", fd.g, telegeom.torsion_at(fd).K)
        worst = max(worst, float(np.max(np.abs(K_low + K_low.transpose(1, 0, 2)))))
    return CheckRecord("contortion_antisymmetry", len(ctx.fds), worst, tol)


def _check_superpotential_antisymmetry(ctx, tol):
    worst = 0.0
    for fd in ctx.fds:
        S = telegeom.torsion_at(fd).S
        worst = max(worst, float(np.max(np.abs(S + S.transpose(0, 2, 1)))))
    return CheckRecord("superpotential_antisymmetry", len(ctx.fds), worst, tol)


def _check_anholonomy(ctx, tol):
    worst = 0.0
    for fd in ctx.fds:
        f = alg.anholonomy_at(fd)
        Tc = alg.structure_functions_at(fd).Tc
        worst = max(worst, float(np.max(np.abs(f + Tc))))
    return CheckRecord("anholonomy", len(ctx.fds), worst, tol)


def _check_commutator(ctx, tol, n_funcs=20):
    rng = ctx.rng(11)
    D = ctx.chart.dim
    worst = 0.0
    for i in range(n_funcs):
        phi = random_trig_poly(ctx.chart, rng, ctx.box)
        fd = ctx.fds[i % len(ctx.fds)]
        sf = alg.structure_functions_at(fd)
        pt = fd.point
        for a in range(D):
            for b in range(D):
                worst = max(worst, alg.commutator_check(a, b, phi, pt, fd, sf))
    return CheckRecord("commutator", n_funcs, worst, tol)


def _check_anchor_homomorphism(ctx, tol, n_combos=100):
    rng = ctx.rng(12)
    worst = 0.0
    for i in range(n_combos):
        u = random_section(ctx.chart, rng, ctx.box)
        v = random_section(ctx.chart, rng, ctx.box)
        fd = ctx.fds[i % len(ctx.fds)]
        worst = max(worst, alg.anchor_homomorphism_residual(u, v, fd.point, fd))
    return CheckRecord("anchor_homomorphism", n_combos, worst, tol)


def _check_leibniz(ctx, tol, n_combos=100):
    rng = ctx.rng(13)
    worst = 0.0
    for i in range(n_combos):
        u = random_section(ctx.chart, rng, ctx.box)
        v = random_section(ctx.chart, rng, ctx.box)
        f = random_polynomial(ctx.chart, rng, ctx.box)
        fd = ctx.fds[i % len(ctx.fds)]
        worst = max(worst, alg.leibniz_residual(u, v, f, fd.point, fd))
    return CheckRecord("leibniz", n_combos, worst, tol)


def _check_jacobi(ctx, tol, n_triples=50):
    rng = ctx.rng(14)
    worst = 0.0
    for i in range(n_triples):
        u = random_section(ctx.chart, rng, ctx.box)
        v = random_section(ctx.chart, rng, ctx.box)
        w = random_section(ctx.chart, rng, ctx.box)
        fd = ctx.fds[i % len(ctx.fds)]
        worst = max(worst, alg.jacobi_residual(u, v, w, fd.point, fd))
    return CheckRecord("jacobi", n_triples, worst, tol)


def _check_gauge_invariance(ctx, tol, n_eps=20):
    from .tetrad import component_jets_many

    rng = ctx.rng(15)
    pts, _ = ctx.subsample(10)
    _, dh0, _ = component_jets_many(ctx.tetrad, pts)
    T0 = dh0.transpose(0, 1, 3, 2) - dh0
    worst = 0.0
    for _ in range(n_eps):
        eps = [random_polynomial(ctx.chart, rng, ctx.box, degree=2)
               for _ in range(ctx.chart.dim)]
        shifted = alg.gauge_transform(ctx.tetrad, eps)
        _, dh1, _ = component_jets_many(shifted, pts)
        T1 = dh1.transpose(0, 1, 3, 2) - dh1
        worst = max(worst, float(np.max(np.abs(T1 - T0))))
    return CheckRecord("gauge_invariance", n_eps, worst, tol)


def _check_einstein_symmetry(ctx, tol):
    worst = 0.0
    for fd in ctx.fds:
        G = telegeom.riemann_at(telegeom.christoffel_at(fd), fd).einstein
        worst = max(worst, float(np.max(np.abs(G - G.T))))
    return CheckRecord("einstein_symmetry", len(ctx.fds), worst, tol)


def _check_bianchi_divergence(ctx, tol, n_pts=5):
    pts, _ = ctx.subsample(n_pts)
    worst = max(telegeom.bianchi_divergence_residual(ctx.tetrad, p) for p in pts)
    return CheckRecord("bianchi_divergence", len(pts), worst, tol)


def _check_momentum_proportionality(ctx, tol, n_pts=8):
    pts, _ = ctx.subsample(n_pts)
    c1, spread, _ = fieldeq.measure_momentum_constant(ctx.tetrad, pts, ctx.cfg.k)
    ctx.c1 = c1
    return CheckRecord("momentum_proportionality", len(pts), spread, tol)


def _check_field_equation(ctx, tol, n_pts=25):
    pts, _ = ctx.subsample(n_pts)
    rels = []
    for p in pts:
        parts = fieldeq.field_eq_parts_at(ctx.tetrad, p, ctx.cfg.k)
        rel = (float(np.max(np.abs(parts["residual"]))) / parts["scale"]
               if parts["scale"] > 0 else 0.0)
        rels.append(rel)
    if ctx.cfg.non_vacuum:
        floor = ctx.cfg.tolerance("field_equation_floor")
        return CheckRecord("field_equation_floor", len(pts), min(rels), floor,
                           mode="geq")
    return CheckRecord("field_equation", len(pts), max(rels), tol)


_REGISTRY = [
    ("tetrad_inverses", _check_tetrad_inverses),
    ("metric_symmetry", _check_metric_symmetry),
    ("metric_signature", _check_metric_signature),
    ("flatness", _check_flatness),
    ("decomposition", _check_decomposition),
    ("torsion_consistency", _check_torsion_consistency),
    ("gauge_potential_match", _check_gauge_potential_match),
    ("gauge_potential_reconstruction", _check_gauge_potential_reconstruction),
    ("contortion_antisymmetry", _check_contortion_antisymmetry),
    ("superpotential_antisymmetry", _check_superpotential_antisymmetry),
    ("anholonomy", _check_anholonomy),
    ("commutator", _check_commutator),
    ("anchor_homomorphism", _check_anchor_homomorphism),
    ("leibniz", _check_leibniz),
    ("jacobi", _check_jacobi),
    ("gauge_invariance", _check_gauge_invariance),
    ("einstein_symmetry", _check_einstein_symmetry),
    ("bianchi_divergence", _check_bianchi_divergence),
    ("momentum_proportionality", _check_momentum_proportionality),
    ("field_equation", _check_field_equation),
]

CHECK_NAMES = [name for name, _ in _REGISTRY]


def run_suite(cfg):
    """Run the configured identity checks and assemble a deterministic report.

    Failing checks are recorded, never raised; only configuration or
    evaluation errors abort the suite.
    """
    names = cfg.checks if cfg.checks is not None else CHECK_NAMES
    unknown = [n for n in names if n not in CHECK_NAMES]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; known: {CHECK_NAMES}")
    for name, tol in cfg.tolerances.items():
        base = name[:-6] if name.endswith("_floor") else name
        if base not in CHECK_NAMES and name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"tolerance for unknown check {name!r}")
        if tol <= 0 and DEFAULT_TOLERANCES.get(name, 1.0) != 0.0:
            raise ConfigError(f"tolerance for {name!r} must be positive")

    points = sample_points(cfg.tetrad.domain_box(), cfg.n_points, cfg.seed)
    fds = frame_data_many(cfg.tetrad, points)
    ctx = _Ctx(cfg, points, fds)
    records = []
    for name, fn in _REGISTRY:
        if name not in names:
            continue
        records.append(fn(ctx, cfg.tolerance(name)))
    conventions = {
        "signature": list(cfg.tetrad.chart.signature),
        "riemann_sign": RIEMANN_SIGN,
        "momentum_constant_c1": ctx.c1,
        "coupling_k": cfg.k,
        "backend": BACKEND,
    }
    return Report(tetrad_name=cfg.tetrad.name, tetrad_params=cfg.tetrad.params,
                  records=records, seed=cfg.seed, n_points=cfg.n_points,
                  conventions=conventions, version=ARTIFACT_VERSION)
