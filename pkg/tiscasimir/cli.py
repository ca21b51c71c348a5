"""
Command-line interface for TISCasimir.

Subcommands: energy, sweep, tis, epstein, asymptotics and selftest. Output is
CSV (default) or JSON; CSV starts with '#' metadata lines followed by one
column-header row. Exit codes: 0 success, 1 usage or validation error,
2 numerical failure (convergence, extrapolation or route disagreement).
"""

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, NoReturn, Optional, Sequence, TextIO

import numpy as np

from . import __version__
from .core.casimir import (
    LOW_TEMPERATURE_LIMIT,
    Relation,
    Route,
    Slab,
    breakdown_summary,
    compare_routes,
    free_energy_antiperiodic,
    high_temperature_expansion,
    low_temperature_correction,
    thermal_part,
    tis_check,
)
from .core.config import ConfigLoader, EngineConfig
from .core.epstein import Z_STEP, EpsteinForm, epstein2, epstein2_deriv_z, epstein2_direct
from .core.exceptions import (
    CasimirError,
    ConfigError,
    ConvergenceError,
    DomainError,
    ExtrapolationError,
    PoleError,
    RouteDisagreementError,
)
from .core.lattice import SumControl, SumMode
from .core.oracle import thermal_oracle, zero_point_oracle

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

UNITS_LINE = (
    "units: natural (hbar = c = k_B = 1); free energies per unit area in 1/length^3"
)

ENERGY_COLUMNS = ["xi", "a", "beta", "e0", "f1", "f2", "thermal", "total", "route", "est_error"]
TIS_COLUMNS = ["relation", "xi", "lhs", "rhs", "abs_residual", "rel_residual", "fixed_point"]
EPSTEIN_COLUMNS = ["z", "a1", "a2", "value", "deriv_z", "direct", "direct_est_error"]
ASYMPTOTIC_COLUMNS = ["quantity", "value"]

_ROUTE_NAMES = {
    "decomposition": [Route.DECOMPOSITION],
    "f-series": [Route.F_SERIES],
    "zeta": [Route.ZETA],
    "all": [Route.DECOMPOSITION, Route.F_SERIES, Route.ZETA],
}

_RELATION_NAMES = {
    "f1": Relation.F1_RELATION,
    "f2-corrected": Relation.F2_RELATION_CORRECTED,
    "f2-as-printed": Relation.F2_RELATION_AS_PRINTED,
    "g": Relation.G_REFLECTION,
}

_FIXED_POINTS = {
    Relation.F1_RELATION: 1.0 / (2.0 * math.pi),
    Relation.F2_RELATION_CORRECTED: 1.0 / math.pi,
    Relation.F2_RELATION_AS_PRINTED: 1.0 / math.pi,
    Relation.G_REFLECTION: 1.0,
}


class SweepVariable(str, Enum):
    XI = "xi"
    BETA = "beta"
    T = "T"


class Spacing(str, Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class SweepSpec:
    """Grid of slabs along one variable at fixed antiperiod a."""

    variable: SweepVariable
    start: float
    stop: float
    points: int
    spacing: Spacing
    a: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "variable", SweepVariable(self.variable))
        object.__setattr__(self, "spacing", Spacing(self.spacing))
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise DomainError("a", self.a)
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise DomainError("from", self.start, "sweep bounds must be finite")
        if not self.start < self.stop:
            raise DomainError("from", self.start, "'from' must be smaller than 'to'")
        if self.points < 2:
            raise DomainError("points", self.points, "a sweep needs at least 2 points")
        if self.spacing is Spacing.LOG and self.start <= 0.0:
            raise DomainError("from", self.start, "log spacing needs 'from' > 0")

    def grid(self) -> List[float]:
        if self.spacing is Spacing.LOG:
            values = np.geomspace(self.start, self.stop, self.points)
        else:
            values = np.linspace(self.start, self.stop, self.points)
        return [float(v) for v in values]

    def slab(self, value: float) -> Slab:
        if self.variable is SweepVariable.XI:
            return Slab.from_xi(self.a, value)
        if self.variable is SweepVariable.BETA:
            return Slab(a=self.a, beta=value)
        return Slab.from_temperature(self.a, value)


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _format_number(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class ReportWriter:
    """Renders rows as CSV with '#' metadata lines, or as a JSON document."""

    def __init__(self, fmt: str, command: str):
        self.fmt = fmt
        self.command = command

    def metadata(self) -> Dict[str, str]:
        return {
            "generator": f"tiscasimir {__version__}",
            "units": UNITS_LINE,
            "command": self.command,
        }

    def render(
        self,
        columns: Sequence[str],
        rows: Sequence[Dict[str, Any]],
        summary: Optional[Dict[str, Any]] = None,
        notes: Sequence[str] = (),
    ) -> str:
        if self.fmt == "json":
            document: Dict[str, Any] = {
                "metadata": self.metadata(),
                "columns": list(columns),
                "rows": [{c: _json_value(row.get(c)) for c in columns} for row in rows],
            }
            if summary is not None:
                document["summary"] = {k: _json_value(v) for k, v in summary.items()}
            if notes:
                document["notes"] = list(notes)
            return json.dumps(document, indent=2) + "\n"

        buffer = io.StringIO()
        meta = self.metadata()
        buffer.write(f"# {meta['generator']}\n")
        buffer.write(f"# {meta['units']}\n")
        buffer.write(f"# command: {meta['command']}\n")
        for note in notes:
            buffer.write(f"# {note}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_number(row.get(c, "")) for c in columns])
        if summary is not None:
            listed = ", ".join(f"{k}={_format_number(v)}" for k, v in summary.items())
            buffer.write(f"# summary: {listed}\n")
        return buffer.getvalue()


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _sum_control(args: argparse.Namespace, config: EngineConfig) -> SumControl:
    rel_tol = args.tol
    if rel_tol is None:
        rel_tol = config.sum_control.rel_tol if config.source else DEFAULT_TOL
    overridden = config.with_overrides(rel_tol=rel_tol, max_terms=args.max_terms, mode=args.mode)
    return overridden.sum_control


def _slab_from_args(args: argparse.Namespace) -> Slab:
    if args.beta is not None:
        return Slab(a=args.a, beta=args.beta)
    if args.xi is not None:
        return Slab.from_xi(args.a, args.xi)
    return Slab.from_temperature(args.a, args.temperature)


def cmd_energy(args: argparse.Namespace, config: EngineConfig, writer: ReportWriter) -> int:
    ctl = _sum_control(args, config)
    slab = _slab_from_args(args)
    routes = _ROUTE_NAMES[args.route]
    if len(routes) > 1:
        results = list(compare_routes(slab, routes, ctl).values())
    else:
        results = [free_energy_antiperiodic(slab, routes[0], ctl)]
    rows = [breakdown_summary(r) for r in results]

    notes: List[str] = []
    summary: Optional[Dict[str, Any]] = None
    if args.verify:
        oracle_ctl = config.oracle_control
        reference = results[0]
        therm_oracle = thermal_oracle(slab, oracle_ctl)
        zp_oracle = zero_point_oracle(slab.a, oracle_ctl)
        therm_diff = abs(reference.thermal - therm_oracle) / max(abs(therm_oracle), 1e-300)
        summary = {
            "thermal_oracle": therm_oracle,
            "thermal_rel_diff": therm_diff,
            "zero_point_oracle": zp_oracle,
            "zero_point_abs_diff": abs(reference.e0 - zp_oracle),
        }
        notes.append("verify: oracles computed independently of the lattice and zeta routes")
    _emit(writer.render(ENERGY_COLUMNS, rows, summary, notes), args.output)
    return EXIT_OK


def _failed_row(slab: Slab) -> Dict[str, Any]:
    row: Dict[str, Any] = {c: math.nan for c in ENERGY_COLUMNS}
    row.update({"xi": slab.xi(), "a": slab.a, "beta": slab.beta, "route": "failed"})
    return row


def cmd_sweep(args: argparse.Namespace, config: EngineConfig, writer: ReportWriter) -> int:
    ctl = _sum_control(args, config)
    spec = SweepSpec(
        variable=args.variable,
        start=args.start,
        stop=args.stop,
        points=args.points,
        spacing=args.spacing,
        a=args.a,
    )
    slabs = [spec.slab(v) for v in spec.grid()]
    route = _ROUTE_NAMES[args.route][0]

    def evaluate(slab: Slab) -> Optional[Dict[str, Any]]:
        try:
            return breakdown_summary(free_energy_antiperiodic(slab, route, ctl))
        except (ConvergenceError, RouteDisagreementError) as e:
            logger.error("sweep point %r failed: %s", slab, e)
            return None

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(evaluate, slabs))

    rows = [r if r is not None else _failed_row(s) for r, s in zip(results, slabs)]
    failures = sum(1 for r in results if r is None)
    summary = {"points": len(rows), "failed": failures}
    _emit(writer.render(ENERGY_COLUMNS, rows, summary), args.output)
    return EXIT_NUMERICAL if failures else EXIT_OK


def _tis_grid(start: float, stop: float, points: int, fixed: float) -> List[float]:
    grid = [float(v) for v in np.geomspace(start, stop, points)]
    if start <= fixed <= stop and not any(math.isclose(v, fixed, rel_tol=1e-13) for v in grid):
        grid.append(fixed)
    return sorted(grid)


def cmd_tis(args: argparse.Namespace, config: EngineConfig, writer: ReportWriter) -> int:
    ctl = _sum_control(args, config)
    if not (0.0 < args.start < args.stop):
        raise DomainError("from", args.start, "need 0 < from < to")
    if args.points < 2:
        raise DomainError("points", args.points, "need at least 2 points")
    relation = _RELATION_NAMES[args.relation]
    rows = []
    for xi in _tis_grid(args.start, args.stop, args.points, _FIXED_POINTS[relation]):
        report = tis_check(relation, xi, ctl)
        rows.append(
            {
                "relation": report.relation.value,
                "xi": report.xi,
                "lhs": report.lhs,
                "rhs": report.rhs,
                "abs_residual": report.abs_residual,
                "rel_residual": report.rel_residual,
                "fixed_point": report.fixed_point,
            }
        )
    summary = {"max_rel_residual": max(r["rel_residual"] for r in rows)}
    _emit(writer.render(TIS_COLUMNS, rows, summary), args.output)
    return EXIT_OK


def cmd_epstein(args: argparse.Namespace, config: EngineConfig, writer: ReportWriter) -> int:
    ctl = _sum_control(args, config)
    form = EpsteinForm(args.z, args.a1, args.a2)
    row: Dict[str, Any] = {"z": form.z, "a1": form.a1, "a2": form.a2, "value": epstein2(form)}
    row["deriv_z"] = epstein2_deriv_z(form) if abs(form.z - 1.0) >= 4.0 * Z_STEP else math.nan
    if args.direct and form.z > 1.0:
        direct = epstein2_direct(form, ctl)
        row["direct"] = direct.value
        row["direct_est_error"] = direct.est_error
    else:
        row["direct"] = math.nan
        row["direct_est_error"] = math.nan
    _emit(writer.render(EPSTEIN_COLUMNS, [row]), args.output)
    return EXIT_OK


def cmd_asymptotics(args: argparse.Namespace, config: EngineConfig, writer: ReportWriter) -> int:
    ctl = _sum_control(args, config)
    slab = _slab_from_args(args)
    terms = high_temperature_expansion(slab)
    rows: List[Dict[str, Any]] = [{"quantity": name, "value": value} for name, value in terms]
    expansion = math.fsum(v for _, v in terms)
    full = free_energy_antiperiodic(slab, Route.F_SERIES, ctl).total
    rows.append({"quantity": "expansion_sum", "value": expansion})
    rows.append({"quantity": "full_total", "value": full})
    rows.append({"quantity": "expansion_rel_diff", "value": abs(expansion - full) / abs(full)})
    if slab.xi() < LOW_TEMPERATURE_LIMIT:
        rows.append(
            {
                "quantity": "low_temperature_correction",
                "value": low_temperature_correction(slab, ctl),
            }
        )
        rows.append({"quantity": "thermal_part", "value": thermal_part(slab, ctl)})
    _emit(writer.render(ASYMPTOTIC_COLUMNS, rows), args.output)
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace, config: EngineConfig, writer: ReportWriter) -> int:
    from .selftest import SELFTEST_COLUMNS, run_selftest

    tol = args.tol if args.tol is not None else DEFAULT_TOL
    if not (math.isfinite(tol) and tol > 0.0):
        raise DomainError("tol", tol)
    report = run_selftest(tol=tol, config=config)
    _emit(writer.render(SELFTEST_COLUMNS, report.rows(), report.summary()), args.output)
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv", help="Output format")
    common.add_argument("--output", help="Output file (default: stdout)")
    common.add_argument(
        "--tol", type=float, default=None, help=f"Relative tolerance (default: {DEFAULT_TOL:g})"
    )
    common.add_argument("--max-terms", type=int, default=None, help="Cap on terms per index")
    common.add_argument(
        "--mode", choices=[m.value for m in SumMode], default=None, help="Lattice sum mode"
    )
    common.add_argument("--config", help="YAML or JSON configuration file")
    common.add_argument("--verbose", action="store_true", help="Log debug output to stderr")
    return common


def _add_slab_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--a", type=float, required=True, help="Antiperiod a")
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--beta", type=float, help="Inverse temperature")
    group.add_argument("--xi", type=float, help="Reduced temperature a / (pi beta)")
    group.add_argument("--temperature", type=float, help="Temperature 1 / beta")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = CliParser(
        prog="tiscasimir",
        description="Finite-temperature Casimir free energy of an antiperiodic scalar field",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    energy = sub.add_parser("energy", parents=[common], help="Free energy at one point")
    _add_slab_options(energy)
    energy.add_argument("--route", choices=list(_ROUTE_NAMES), default="decomposition")
    energy.add_argument("--verify", action="store_true", help="Also run the oracles")

    sweep = sub.add_parser("sweep", parents=[common], help="Free energy over a grid")
    sweep.add_argument("--a", type=float, default=1.0, help="Antiperiod a (default: 1)")
    sweep.add_argument("--variable", choices=[v.value for v in SweepVariable], default="xi")
    sweep.add_argument("--from", dest="start", type=float, default=0.05)
    sweep.add_argument("--to", dest="stop", type=float, default=20.0)
    sweep.add_argument("--points", type=int, default=25)
    sweep.add_argument("--spacing", choices=[s.value for s in Spacing], default="log")
    sweep.add_argument(
        "--route", choices=["decomposition", "f-series", "zeta"], default="decomposition"
    )
    sweep.add_argument("--jobs", type=int, default=1, help="Concurrent evaluations")

    tis = sub.add_parser("tis", parents=[common], help="Temperature inversion symmetry report")
    tis.add_argument("--relation", choices=list(_RELATION_NAMES), default="f1")
    tis.add_argument("--from", dest="start", type=float, default=0.02)
    tis.add_argument("--to", dest="stop", type=float, default=50.0)
    tis.add_argument("--points", type=int, default=25)

    epstein = sub.add_parser("epstein", parents=[common], help="Epstein zeta function")
    epstein.add_argument("--z", type=float, required=True)
    epstein.add_argument("--a1", type=float, required=True)
    epstein.add_argument("--a2", type=float, required=True)
    epstein.add_argument("--direct", action="store_true", help="Also sum directly (z > 1)")

    asym = sub.add_parser("asymptotics", parents=[common], help="High/low temperature terms")
    _add_slab_options(asym)

    sub.add_parser("selftest", parents=[common], help="Run the acceptance suite")
    return parser


_COMMANDS = {
    "energy": cmd_energy,
    "sweep": cmd_sweep,
    "tis": cmd_tis,
    "epstein": cmd_epstein,
    "asymptotics": cmd_asymptotics,
    "selftest": cmd_selftest,
}


def _configure_logging(verbose: bool, stream: TextIO) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=stream,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Command-line entry point; returns the process exit code."""
    arguments = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(arguments)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    _configure_logging(args.verbose, sys.stderr)

    writer = ReportWriter(args.format, " ".join(["tiscasimir", *arguments]))
    try:
        config = ConfigLoader().load(args.config)
        return _COMMANDS[args.command](args, config, writer)
    except (DomainError, PoleError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ExtrapolationError, RouteDisagreementError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CasimirError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
