#!/usr/bin/env python3
"""
Farey third-gap toolkit

Command-line entry point: enumerate Farey sequences, extract normalized
gaps between fractions two apart, query the limiting measure, export the
support and its boundary curves, and run the self-check suites.

Version: 1.0.0
"""

import argparse
import math
import sys
import time
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from rich.console import Console
from rich.table import Table

from curve_catalog import CurveSpec, curve_eval, select_rows
from errors import FareyError, InvalidParameterError, MeasureConvergenceError
from export import (
    OutputFormat,
    OutputSpec,
    open_output,
    records_to_json,
    render_svg,
    write_csv,
    write_json,
)
from farey_core import SequenceParams, farey_sequence, gap_tuples
from phi_measure import BoxSpec, MeasureMethod, measure_box, measure_box_mc, support_points
from settings import FareySettings, configure_logging, get_settings
from verify import SUITES, CheckResult, run_suite, table_rows

logger = structlog.get_logger(__name__)

VERSION = "1.0.0"
DEFAULT_PARAM_MAX = 12
METHODS = {"quad": MeasureMethod.ADAPTIVE, "mc": MeasureMethod.MONTE_CARLO}


def parse_interval(text: Optional[str]) -> Tuple[Fraction, Fraction]:
    """
    Parse "a/b,c/d" (decimals allowed) into an exact interval.

    Raises:
        InvalidParameterError: If the text is not two comma-separated rationals
    """
    if not text:
        return Fraction(0), Fraction(1)
    parts = text.split(",")
    if len(parts) != 2:
        raise InvalidParameterError(f"Interval must look like 'a/b,c/d', got {text!r}")
    try:
        return Fraction(parts[0].strip()), Fraction(parts[1].strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidParameterError(f"Invalid interval {text!r}: {e}") from e


def log_uniform(lo: float, hi: float, n: int) -> np.ndarray:
    """n parameters at the midpoints of a log-uniform partition of [lo, hi]."""
    s = (np.arange(n) + 0.5) / n
    return np.exp(math.log(lo) + s * (math.log(hi) - math.log(lo)))


def curve_samples(spec: CurveSpec, n: int, t_cap: float) -> List[Tuple[float, float, float]]:
    """(t, X, Y) along one boundary curve; unbounded domains stop at t_cap."""
    lo, hi = spec.t_domain
    hi = t_cap if hi is None else hi
    return [(float(t), *curve_eval(spec, float(t))) for t in log_uniform(float(lo), float(hi), n)]


# --- subcommands ---


def cmd_list(args: argparse.Namespace, settings: FareySettings) -> int:
    params = SequenceParams(args.q, parse_interval(args.interval))
    output = OutputSpec.from_args(args.format, args.out)
    if output.format is OutputFormat.SVG:
        raise InvalidParameterError("list writes csv or json")

    header = ("index", "numerator", "denominator", "value")
    rows = (
        (i, f.a, f.q, float(f.value))
        for i, f in enumerate(farey_sequence(params), start=1)
    )
    with open_output(output) as stream:
        if output.format is OutputFormat.JSON:
            write_json(stream, records_to_json(header, rows))
        else:
            write_csv(stream, header, rows)
    return 0


def cmd_gaps(args: argparse.Namespace, settings: FareySettings) -> int:
    params = SequenceParams(args.q, parse_interval(args.interval))
    output = OutputSpec.from_args(args.format, args.out)
    output.require_2d(args.h)

    header = ["j"] + [f"g{i}" for i in range(1, args.h + 1)]
    windows = gap_tuples(params, args.h)
    with open_output(output) as stream:
        if output.format is OutputFormat.JSON:
            rows = ((w.start_index, *w.values) for w in windows)
            write_json(stream, records_to_json(header, rows))
        elif output.format is OutputFormat.SVG:
            stream.write(render_svg([w.values for w in windows], title=f"Third gaps, Q = {args.q}"))
        else:
            write_csv(stream, header, ((w.start_index, *w.values) for w in windows))
    return 0


def cmd_measure(args: argparse.Namespace, settings: FareySettings) -> int:
    box = BoxSpec.parse(args.box)
    h = box.h if args.h is None else args.h
    start = time.perf_counter()
    status = 0
    try:
        method = METHODS[args.method]
        if method is MeasureMethod.ADAPTIVE and h > 2:
            logger.info("measure_fallback", h=h, method="mc")
            method = MeasureMethod.MONTE_CARLO
        if method is MeasureMethod.MONTE_CARLO:
            result = measure_box_mc(box, h=h, samples=args.samples, seed=args.seed, settings=settings)
        else:
            result = measure_box(box, h=h, tol=args.tol, settings=settings)
    except MeasureConvergenceError as e:
        logger.warning("measure_not_converged", error=str(e))
        print(f"Warning: {e}", file=sys.stderr)
        if e.partial is None:
            return 1
        result, status = e.partial, 1

    payload = result.to_dict()
    logger.info("measure_done", seconds=round(time.perf_counter() - start, 3), **payload)
    with open_output(OutputSpec(OutputFormat.JSON, None)) as stream:
        write_json(stream, payload)
    return status


def cmd_support(args: argparse.Namespace, settings: FareySettings) -> int:
    output = OutputSpec.from_args(args.format, args.out)
    output.require_2d(args.h)
    points = support_points(args.h, args.kmax, args.samples)
    logger.info("support_sampled", points=len(points), min=float(points.min()) if len(points) else None)

    with open_output(output) as stream:
        if output.format is OutputFormat.SVG:
            title = f"Support of the third-gap measure, cells up to {args.kmax}"
            stream.write(render_svg([tuple(p) for p in points.tolist()], title=title))
        else:
            header = ["x", "y"] if args.h == 2 else [f"g{i}" for i in range(1, args.h + 1)]
            rows = [tuple(p) for p in points.tolist()]
            if output.format is OutputFormat.JSON:
                write_json(stream, records_to_json(header, rows))
            else:
                write_csv(stream, header, rows)
    return 0


def cmd_curves(args: argparse.Namespace, settings: FareySettings) -> int:
    if args.param_max < 5:
        raise InvalidParameterError(f"--param-max must be at least 5, got {args.param_max}")
    if args.samples < 1:
        raise InvalidParameterError(f"--samples must be positive, got {args.samples}")
    output = OutputSpec.from_args(args.format, args.out)

    if args.rows.strip().lower() == "all":
        specs = table_rows(range(5, args.param_max + 1))
    else:
        specs = select_rows(args.rows)

    sampled = [(spec, curve_samples(spec, args.samples, settings.curve_t_cap)) for spec in specs]
    with open_output(output) as stream:
        if output.format is OutputFormat.SVG:
            polylines = [[(x, y) for _, x, y in samples] for _, samples in sampled]
            stream.write(render_svg([], polylines, title=f"Boundary curves: {args.rows}"))
        else:
            header = ("k", "l", "edge_index", "t", "X", "Y")
            rows = [
                (*spec.cell, spec.edge_index, t, x, y)
                for spec, samples in sampled
                for t, x, y in samples
            ]
            if output.format is OutputFormat.JSON:
                write_json(stream, records_to_json(header, rows))
            else:
                write_csv(stream, header, rows)
    return 0


def render_checks(suite: str, results: Sequence[CheckResult], console: Console) -> None:
    table = Table(title=f"verify: {suite}")
    table.add_column("check")
    table.add_column("result")
    table.add_column("detail")
    table.add_column("seconds", justify="right")
    for r in results:
        mark = "[green]PASS[/green]" if r.passed else "[red]FAIL[/red]"
        table.add_row(r.name, mark, r.detail, f"{r.seconds:.2f}")
    console.print(table)


def cmd_verify(args: argparse.Namespace, settings: FareySettings) -> int:
    if args.suite not in SUITES:
        raise InvalidParameterError(f"Unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    results = run_suite(args.suite, args.max, settings)
    render_checks(args.suite, results, Console(highlight=False, soft_wrap=True))
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.error("verify_failed", suite=args.suite, failed=failed)
        return 1
    return 0


# --- argument parsing ---


def _add_output(parser: argparse.ArgumentParser, formats: Sequence[str]) -> None:
    parser.add_argument(
        "--format",
        choices=list(formats),
        default=None,
        help="Output format (default: from --out suffix, else csv)",
    )
    parser.add_argument("--out", type=str, default=None, help="Output file (default: standard output)")


def build_parser(settings: FareySettings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="farey",
        description="Distribution of gaps between Farey fractions two apart",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s list --q 5
  %(prog)s gaps --q 100 --h 2 --interval 0,1/2
  %(prog)s measure --box 0.7,1.2,0.7,1.2 --method quad --tol 1e-4
  %(prog)s support --kmax 40 --samples 200 --out swallow.svg
  %(prog)s curves --rows 2,2 --samples 100
  %(prog)s verify --suite table1

Environment Variables:
  LOG_LEVEL          Logging level (DEBUG, INFO, WARNING, ERROR)
  FAREY_THREADS      Worker threads for Monte Carlo sampling
  FAREY_SEED         Default Monte Carlo seed
        """,
    )
    parser.add_argument("--version", action="version", version=f"farey {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="Enumerate F_Q restricted to an interval")
    p.add_argument("--q", type=int, required=True, help="Order Q of the sequence")
    p.add_argument("--interval", type=str, default=None, help="Closed interval 'a/b,c/d' (default: 0,1)")
    _add_output(p, ("csv", "json"))
    p.set_defaults(handler=cmd_list)

    p = sub.add_parser("gaps", help="Normalized third gaps of consecutive windows")
    p.add_argument("--q", type=int, required=True, help="Order Q of the sequence")
    p.add_argument("--h", type=int, default=2, help="Window length (default: 2)")
    p.add_argument("--interval", type=str, default=None, help="Closed interval 'a/b,c/d' (default: 0,1)")
    _add_output(p, ("csv", "json", "svg"))
    p.set_defaults(handler=cmd_gaps)

    p = sub.add_parser("measure", help="Limiting measure of a box")
    p.add_argument("--box", type=str, required=True, help="Flat list a1,b1[,a2,b2]; 'inf' allowed for b")
    p.add_argument("--h", type=int, default=None, help="Dimension (default: from --box)")
    p.add_argument(
        "--method",
        choices=list(METHODS),
        default="quad",
        help="Adaptive quadrature or Monte Carlo; h > 2 always uses mc (default: quad)",
    )
    p.add_argument("--tol", type=float, default=None, help=f"Quadrature tolerance (default: {settings.quad_tol})")
    p.add_argument("--samples", type=int, default=None, help=f"Monte Carlo samples (default: {settings.mc_samples})")
    p.add_argument("--seed", type=int, default=None, help=f"Monte Carlo seed (default: {settings.seed})")
    p.set_defaults(handler=cmd_measure)

    p = sub.add_parser("support", help="Point cloud of the support")
    p.add_argument("--kmax", type=int, default=40, help="Largest cell index sampled (default: 40)")
    p.add_argument("--samples", type=int, default=200, help="Points per cell (default: 200)")
    p.add_argument("--h", type=int, default=2, help="Dimension (default: 2)")
    _add_output(p, ("csv", "json", "svg"))
    p.set_defaults(handler=cmd_support)

    p = sub.add_parser("curves", help="Sample the boundary curves of the support")
    p.add_argument("--rows", type=str, default="all", help="'all' or a cell 'k,l' (default: all)")
    p.add_argument("--samples", type=int, default=100, help="Points per curve (default: 100)")
    p.add_argument(
        "--param-max",
        type=int,
        default=DEFAULT_PARAM_MAX,
        help=f"Largest family parameter with --rows all (default: {DEFAULT_PARAM_MAX})",
    )
    _add_output(p, ("csv", "json", "svg"))
    p.set_defaults(handler=cmd_curves)

    p = sub.add_parser("verify", help="Run a self-check suite")
    p.add_argument("--suite", type=str, required=True, help=f"One of: {', '.join(SUITES)}")
    p.add_argument("--max", type=int, default=None, help="Size limit of the suite (Q or cell index)")
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Main entry point with argument parsing and exit-code mapping."""
    try:
        settings = get_settings()
    except ValueError as e:
        print(f"Error: invalid environment: {e}", file=sys.stderr)
        sys.exit(2)

    parser = build_parser(settings)
    args = parser.parse_args(argv)
    configure_logging(settings)

    try:
        sys.exit(args.handler(args, settings))

    except KeyboardInterrupt:
        logger.info("interrupted")
        print("\nInterrupted by user", file=sys.stderr)
        sys.exit(1)

    except (FareyError, ValueError) as e:
        logger.error("command_failed", command=args.command, error=str(e))
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(2)


if __name__ == "__main__":
    main()
