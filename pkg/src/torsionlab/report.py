"""Structured pass/fail reports for identity suites and their serializations.

Reports are deterministic: records are sorted by check name, dictionary key
order is fixed, and float formatting uses shortest round-trip reprs, so the
same inputs always produce byte-identical output.
"""

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import ConfigError

ARTIFACT_VERSION = "0.1.0"

RIEMANN_SIGN = ("R^rho_{sig mu nu} = d_mu Gam^rho_{sig nu} - d_nu Gam^rho_{sig mu}"
                " + Gam^rho_{lam mu} Gam^lam_{sig nu} - Gam^rho_{lam nu} Gam^lam_{sig mu}"
                " (derivative slot last in Gam^rho_{sig nu})")


@dataclass
class CheckRecord:
    """One identity check: max residual over the sampled points vs tolerance.

    ``mode`` is "leq" for ordinary checks (residual must stay below tolerance)
    and "geq" for power checks on non-vacuum backgrounds, where the residual
    must exceed a floor to show the check can detect a source term.
    """

    name: str
    n_points: int
    max_residual: float
    tolerance: float
    mode: str = "leq"

    @property
    def passed(self):
        if self.mode == "leq":
            return self.max_residual <= self.tolerance
        return self.max_residual >= self.tolerance

    def to_dict(self):
        return {
            "name": self.name,
            "n_points": self.n_points,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "mode": self.mode,
            "pass": self.passed,
        }


@dataclass
class Report:
    tetrad_name: str
    tetrad_params: dict
    records: list
    seed: int = None
    n_points: int = 0
    conventions: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    version: str = ARTIFACT_VERSION

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: r.name)

    @property
    def overall_pass(self):
        return all(r.passed for r in self.records)

    def to_dict(self):
        return {
            "version": self.version,
            "tetrad": {"name": self.tetrad_name, "params": dict(self.tetrad_params)},
            "seed": self.seed,
            "n_points": self.n_points,
            "conventions": dict(self.conventions),
            "checks": [r.to_dict() for r in self.records],
            "overall_pass": self.overall_pass,
            "tables": {k: list(v) for k, v in sorted(self.tables.items())},
        }


CSV_COLUMNS = ["check", "n_points", "max_residual", "tolerance", "mode", "pass"]


def _fmt(x):
    return repr(float(x))


def emit_report(report, fmt="json"):
    """Serialize a report to bytes; formats: json, csv, text."""
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in report.records:
            writer.writerow([r.name, r.n_points, _fmt(r.max_residual),
                             _fmt(r.tolerance), r.mode, str(r.passed).lower()])
        return buf.getvalue().encode()
    if fmt == "text":
        lines = [
            f"torsionlab report v{report.version}",
            f"tetrad: {report.tetrad_name}  params: {report.tetrad_params}",
            f"seed: {report.seed}  points: {report.n_points}",
        ]
        for key, val in report.conventions.items():
            lines.append(f"  {key}: {val}")
        lines.append("")
        width = max((len(r.name) for r in report.records), default=10)
        for r in report.records:
            rel = "<=" if r.mode == "leq" else ">="
            status = "pass" if r.passed else "FAIL"
            lines.append(f"  {r.name:<{width}}  {r.max_residual:12.4e} {rel} "
                         f"{r.tolerance:8.1e}  [{status}]")
        lines.append("")
        lines.append(f"overall: {'pass' if report.overall_pass else 'FAIL'}")
        for tname, rows in sorted(report.tables.items()):
            lines.append("")
            lines.append(f"table {tname}:")
            for row in rows:
                lines.append("  " + "  ".join(f"{k}={v}" for k, v in row.items()))
        return ("\n".join(lines) + "\n").encode()
    raise ConfigError(f"unknown report format {fmt!r}; use json, csv or text")
