"""Command-line interface: catalog, analyze, check, bracket, grid.

Exit codes: 0 success (and every check within tolerance), 1 at least one
tolerance failure, 2 usage or input errors.
"""

import argparse
import csv
import io
import os
import sys

import numpy as np

from . import algebroid as alg
from . import telegeom
from .errors import TorsionLabError
from .exprparse import parse
from .fieldeq import field_eq_parts_at
from .harness import CHECK_NAMES, SuiteConfig, emit_report, run_suite
from .tetrad import CATALOG_NAMES, catalog, frame_data_at, gauge_potential_at, load_tetrad

_CATALOG_HELP = {
    "minkowski": "identity tetrad, Cartesian (t, x, y, z); no parameters",
    "minkowski_polar": "diag(1, 1, r, r sin(theta)) on (t, r, theta, phi); no parameters",
    "schwarzschild": "diag(sqrt(f), 1/sqrt(f), r, r sin(theta)), f = 1 - 2M/r; needs M",
    "frw": "diag(1, a, a, a) on (t, x, y, z); needs scale factor a as an expression in t",
}


def _parse_params(items):
    params = {}
    for item in items or []:
        if "=" not in item:
            raise TorsionLabError(f"--param expects name=value, got {item!r}")
        name, value = item.split("=", 1)
        try:
            params[name] = float(value)
        except ValueError:
            params[name] = value
    return params


def _resolve_tetrad(spec, params):
    if spec in CATALOG_NAMES:
        return catalog(spec, params)
    if os.path.exists(spec):
        return load_tetrad(spec)
    raise TorsionLabError(
        f"{spec!r} is neither a catalog name ({', '.join(CATALOG_NAMES)}) "
        "nor an existing tetrad JSON file")


def _fmt(arr):
    return np.array2string(np.asarray(arr), precision=8, suppress_small=True)


def _cmd_catalog(args):
    print("built-in tetrads:")
    for name in CATALOG_NAMES:
        print(f"  {name:16s} {_CATALOG_HELP[name]}")
    return 0


def _cmd_analyze(args):
    tet = _resolve_tetrad(args.spec, _parse_params(args.param))
    point = np.asarray(args.point, dtype=float)
    if len(point) != tet.dim:
        raise TorsionLabError(f"--point needs {tet.dim} values")
    fd = frame_data_at(tet, point)
    conn = telegeom.weitzenbock_at(fd)
    td = telegeom.torsion_at(fd)
    chris = telegeom.christoffel_at(fd)
    flat = telegeom.riemann_at(conn)
    curved = telegeom.riemann_at(chris, fd)
    sf = alg.structure_functions_at(fd, td)
    B = gauge_potential_at(tet, point)
    parts = field_eq_parts_at(tet, point, args.k)

    print(f"tetrad {tet.name} at point {list(map(float, point))}")
    print(f"signature {tet.chart.signature}, coupling k = {args.k}")
    print(f"\nh^a_mu =\n{_fmt(fd.h_mat)}")
    print(f"\nh_a^mu =\n{_fmt(fd.h_inv)}")
    print(f"\ndet h = {fd.det_h!r}")
    print(f"\ng_munu =\n{_fmt(fd.g)}")
    print(f"\ngauge potential B^a_mu =\n{_fmt(B.B)}")
    print(f"\nflat connection Gam^rho_(nu mu), slices by rho:\n{_fmt(conn.gamma)}")
    print(f"\ntorsion T^rho_(mu nu):\n{_fmt(td.T_coord)}")
    print(f"\ntorsion (frame) T^a_(mu nu):\n{_fmt(td.T_frame)}")
    print(f"\ncontortion K^rho_(mu nu):\n{_fmt(td.K)}")
    print(f"\nsuperpotential S^(rho mu nu):\n{_fmt(td.S)}")
    print(f"\nstructure functions T^c_(ab):\n{_fmt(sf.Tc)}")
    print(f"\nanholonomy f^c_(ab):\n{_fmt(alg.anholonomy_at(fd))}")
    print(f"\nLevi-Civita Gam^rho_(mu nu):\n{_fmt(chris.gamma)}")
    print(f"\nmax |Riemann(flat connection)| = {np.max(np.abs(flat.riemann)):.3e}")
    print(f"\nRicci (Levi-Civita) =\n{_fmt(curved.ricci)}")
    print(f"Ricci scalar = {curved.scalar!r}")
    print(f"Einstein tensor =\n{_fmt(curved.einstein)}")
    print(f"\nLagrangian density = {telegeom.lagrangian_at(fd, args.k)!r}")
    print(f"\nconjugate momentum pi_a^(rho sig):\n{_fmt(parts['momentum'])}")
    print(f"field-equation residual (Euler-Lagrange):\n{_fmt(parts['residual'])}")
    print(f"residual scale = {parts['scale']:.6e}")
    return 0


def _cmd_check(args):
    tet = _resolve_tetrad(args.spec, _parse_params(args.param))
    tolerances = {}
    for name in CHECK_NAMES + ["field_equation_floor"]:
        value = getattr(args, f"tol_{name}", None)
        if value is not None:
            tolerances[name] = value
    checks = args.checks.split(",") if args.checks else None
    cfg = SuiteConfig(tetrad=tet, seed=args.seed, n_points=args.n,
                      tolerances=tolerances, checks=checks,
                      non_vacuum=args.non_vacuum, k=args.k)
    report = run_suite(cfg)
    payload = emit_report(report, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.buffer.write(payload)
    return 0 if report.overall_pass else 1


def _cmd_bracket(args):
    tet = _resolve_tetrad(args.spec, _parse_params(args.param))
    point = np.asarray(args.point, dtype=float)
    chart = tet.chart
    if len(point) != chart.dim:
        raise TorsionLabError(f"--point needs {chart.dim} values")

    numeric_params = {k: v for k, v in tet.params.items() if not isinstance(v, str)}

    def section_from(text):
        comps = text.split(",")
        if len(comps) != chart.dim:
            raise TorsionLabError(f"section needs {chart.dim} comma-separated components")
        return alg.Section([parse(c, chart, params=numeric_params) for c in comps])

    u = section_from(args.u)
    v = section_from(args.v)
    fd = frame_data_at(tet, point)
    sf = alg.structure_functions_at(fd)
    u_val, u_grad, _ = u.jets_at(point)
    v_val, v_grad, _ = v.jets_at(point)
    structure = -np.einsum("a,b,cab->c", u_val, v_val, sf.Tc)
    transport = (np.einsum("a,am,cm->c", u_val, fd.h_inv, v_grad)
                 - np.einsum("a,am,cm->c", v_val, fd.h_inv, u_grad))
    total = structure + transport
    print(f"sections at {list(map(float, point))}:")
    print(f"  u^a = {_fmt(u_val)}")
    print(f"  v^a = {_fmt(v_val)}")
    print("bracket in the frame basis, [u,v]^c:")
    print(f"  structure-function term  -u^a v^b T^c_ab : {_fmt(structure)}")
    print(f"  transport term u^a h_a(v^c) - v^a h_a(u^c): {_fmt(transport)}")
    print(f"  total                                     : {_fmt(total)}")
    anchored = np.einsum("c,cm->m", total, fd.h_inv)
    print(f"anchored to coordinates, rho([u,v])^mu      : {_fmt(anchored)}")
    resid = alg.anchor_homomorphism_residual(u, v, point, fd)
    print(f"anchor-homomorphism residual                : {resid:.3e}")
    return 0


def _cmd_grid(args):
    tet = _resolve_tetrad(args.spec, _parse_params(args.param))
    box = tet.domain_box()
    D = tet.dim
    axes = [box[i, 0] + (box[i, 1] - box[i, 0]) * (np.arange(args.per_axis) + 0.5)
            / args.per_axis for i in range(D)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.column_stack([m.reshape(-1) for m in mesh])

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(tet.chart.coord_names)
    if args.field == "torsion":
        header = names + ["max_abs_torsion"] + [
            f"T{r}_{m}{n}" for r in range(D) for m in range(D) for n in range(D)]
        writer.writerow(header)
        for x in points:
            td = telegeom.torsion_at(frame_data_at(tet, x))
            row = ([repr(float(v)) for v in x]
                   + [repr(float(np.max(np.abs(td.T_coord))))]
                   + [repr(float(v)) for v in td.T_coord.reshape(-1)])
            writer.writerow(row)
    elif args.field == "lagrangian":
        writer.writerow(names + ["lagrangian"])
        for x in points:
            val = telegeom.lagrangian_at(frame_data_at(tet, x), args.k)
            writer.writerow([repr(float(v)) for v in x] + [repr(val)])
    else:
        raise TorsionLabError(f"unknown field {args.field!r}; use torsion or lagrangian")
    payload = buf.getvalue().encode()
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
        print(f"wrote {args.out} ({len(points)} rows)", file=sys.stderr)
    else:
        sys.stdout.buffer.write(payload)
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="torsionlab",
        description="Numerical identity suite for tetrad gravity with torsion "
                    "and its translation-algebroid bracket structure.")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", help="list built-in tetrads and their parameters")

    pa = sub.add_parser("analyze", help="dump all tensors at one point")
    pa.add_argument("spec", help="catalog name or tetrad JSON path")
    pa.add_argument("--point", nargs="+", type=float, required=True)
    pa.add_argument("--param", action="append", metavar="NAME=VALUE")
    pa.add_argument("--k", type=float, default=1.0, help="coupling constant")

    pc = sub.add_parser("check", help="run the identity suite")
    pc.add_argument("spec")
    pc.add_argument("--param", action="append", metavar="NAME=VALUE")
    pc.add_argument("--seed", type=int, default=2024)
    pc.add_argument("--n", type=int, default=100, help="number of sample points")
    pc.add_argument("--checks", help="comma-separated subset of checks")
    pc.add_argument("--out", help="write the report here instead of stdout")
    pc.add_argument("--format", choices=["json", "csv", "text"], default="text")
    pc.add_argument("--non-vacuum", action="store_true",
                    help="expect the field equation to be sourced; the check "
                         "then asserts the residual exceeds a floor")
    pc.add_argument("--k", type=float, default=1.0)
    for name in CHECK_NAMES + ["field_equation_floor"]:
        pc.add_argument(f"--tol-{name.replace('_', '-')}", type=float,
                        dest=f"tol_{name}", help=argparse.SUPPRESS)

    pb = sub.add_parser("bracket", help="evaluate the section bracket at a point")
    pb.add_argument("spec")
    pb.add_argument("--u", required=True, help="comma-separated frame components")
    pb.add_argument("--v", required=True)
    pb.add_argument("--point", nargs="+", type=float, required=True)
    pb.add_argument("--param", action="append", metavar="NAME=VALUE")

    pg = sub.add_parser("grid", help="dump a field on a regular grid as CSV")
    pg.add_argument("spec")
    pg.add_argument("--field", required=True, choices=["torsion", "lagrangian"])
    pg.add_argument("--out")
    pg.add_argument("--per-axis", type=int, default=4)
    pg.add_argument("--param", action="append", metavar="NAME=VALUE")
    pg.add_argument("--k", type=float, default=1.0)

    return p


_COMMANDS = {
    "catalog": _cmd_catalog,
    "analyze": _cmd_analyze,
    "check": _cmd_check,
    "bracket": _cmd_bracket,
    "grid": _cmd_grid,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        return _COMMANDS[args.command](args)
    except TorsionLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
