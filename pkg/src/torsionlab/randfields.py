"""Seeded random scalar fields and sections for property checks.

Coordinates enter through an affine rescaling to [-1, 1] over the tetrad's
sampling box, so generated fields and their first two derivatives stay O(1)
and identity residuals can be held to absolute tolerances.
"""

import numpy as np

from .algebroid import Section
from .exprparse import Add, Call, Coord, Div, Mul, Num, Pow, ScalarField, Sub


def _scaled_coord(chart, idx, box):
    lo, hi = box[idx]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return Mul(Sub(Coord(idx, chart.coord_names[idx]), Num(mid)), Num(1.0 / half))


def random_polynomial(chart, rng, box, degree=2, n_terms=4):
    """Random polynomial in the rescaled coordinates, coefficients in [-1, 1]."""
    D = chart.dim
    ast = Num(round(float(rng.uniform(-1, 1)), 6))
    for _ in range(n_terms):
        term = Num(round(float(rng.uniform(-1, 1)), 6))
        total = int(rng.integers(1, degree + 1))
        for _ in range(total):
            term = Mul(term, _scaled_coord(chart, int(rng.integers(0, D)), box))
        ast = Add(ast, term)
    return ScalarField(chart, ast)


def random_trig_poly(chart, rng, box, n_terms=3):
    """Random mix of sin/cos of affine coordinates times small polynomials."""
    D = chart.dim
    ast = Num(round(float(rng.uniform(-0.5, 0.5)), 6))
    for _ in range(n_terms):
        c = _scaled_coord(chart, int(rng.integers(0, D)), box)
        fn = ("sin", "cos")[int(rng.integers(0, 2))]
        phase = Num(round(float(rng.uniform(0, 3)), 6))
        factor = Call(fn, Add(Mul(Num(round(float(rng.uniform(0.5, 2.0)), 6)), c), phase))
        other = _scaled_coord(chart, int(rng.integers(0, D)), box)
        ast = Add(ast, Mul(Mul(Num(round(float(rng.uniform(-1, 1)), 6)), factor),
                           Add(Num(1.0), other)))
    return ScalarField(chart, ast)


def random_expression(chart, rng, box, depth=3):
    """Random safe expression tree: polynomials, trig, exp, guarded sqrt/log/div.

    Every subexpression stays in-domain on the whole box (sqrt and log see
    1 + u^2, divisions see denominators bounded away from zero).
    """
    D = chart.dim

    def leaf():
        if rng.random() < 0.3:
            return Num(round(float(rng.uniform(-1.5, 1.5)), 6))
        return _scaled_coord(chart, int(rng.integers(0, D)), box)

    def node(d):
        if d <= 0:
            return leaf()
        pick = rng.random()
        if pick < 0.20:
            return Add(node(d - 1), node(d - 1))
        if pick < 0.35:
            return Sub(node(d - 1), node(d - 1))
        if pick < 0.55:
            return Mul(node(d - 1), node(d - 1))
        if pick < 0.62:
            u = node(d - 1)
            return Div(node(d - 1), Add(Num(2.0), Mul(u, u)))
        if pick < 0.72:
            return Call(("sin", "cos")[int(rng.integers(0, 2))], node(d - 1))
        if pick < 0.78:
            return Call("exp", Mul(Num(0.5), Call("sin", node(d - 1))))
        if pick < 0.84:
            u = node(d - 1)
            return Call("sqrt", Add(Num(1.0), Mul(u, u)))
        if pick < 0.90:
            u = node(d - 1)
            return Call("log", Add(Num(1.5), Mul(u, u)))
        if pick < 0.95:
            return Pow(node(d - 1), float(rng.integers(2, 4)))
        return Call(("sinh", "cosh", "tan")[int(rng.integers(0, 3))],
                    Mul(Num(0.4), Call("sin", node(d - 1))))

    return ScalarField(chart, node(depth))


def random_section(chart, rng, box, kind="poly"):
    gen = random_polynomial if kind == "poly" else random_trig_poly
    return Section([gen(chart, rng, box) for _ in range(chart.dim)])
