"""Command-line interface: eval, optimize, sweep, simulate.

All commands emit deterministic RFC-4180 CSV (header row, '.' decimals,
UTF-8) to stdout or --out; sweep/simulate can additionally render a figure
next to the CSV with --plot.  Exit codes: 0 success, 1 usage error,
2 infeasible everywhere, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from typing import Optional

from . import pipeline
from .errors import CachintError, InfeasibleError, NumericalError, ScenarioError
from .scenario import load_scenario

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: list[dict], out: Optional[str]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = list(rows[0].keys())
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format(row.get(column, "")) for column in header])
    text = buffer.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cachint", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario file or preset name")
        p.add_argument("--out", help="write CSV here instead of stdout")

    p_eval = sub.add_parser("eval", help="evaluate the analytic chain at one point")
    common(p_eval)
    p_eval.add_argument("--plot", help="render a figure of the row to this file")

    p_opt = sub.add_parser("optimize", help="optimize cache size and/or intensity")
    common(p_opt)
    p_opt.add_argument(
        "--mode", choices=["fixed-lambda", "fixed-cache", "joint"], default="joint"
    )
    p_opt.add_argument(
        "--oracle", action="store_true", help="append brute-force oracle columns (joint mode)"
    )

    p_sweep = sub.add_parser("sweep", help="sweep one parameter axis")
    common(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=["nu", "S", "lambda", "W", "F"])
    p_sweep.add_argument("--from", dest="start", type=float, required=True)
    p_sweep.add_argument("--to", dest="stop", type=float, required=True)
    p_sweep.add_argument("--points", type=int, required=True)
    p_sweep.add_argument(
        "--mode",
        choices=["eval", "fixed-lambda", "fixed-cache", "joint"],
        default="fixed-lambda",
    )
    p_sweep.add_argument("--oracle", action="store_true")
    p_sweep.add_argument("--plot", help="render sweep curves to this file")

    p_sim = sub.add_parser("simulate", help="Monte Carlo validation experiments")
    common(p_sim)
    p_sim.add_argument("--kind", choices=["coverage", "queue", "delay"], default="coverage")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--trials", type=int, default=100_000)
    p_sim.add_argument("--window-radius", type=float, default=None)
    p_sim.add_argument("--plot", help="render a figure of the row to this file")
    return parser


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "eval":
            rows = [pipeline.evaluate_scenario(scenario)]
        elif args.command == "optimize":
            rows = [
                pipeline.optimize_scenario(scenario, args.mode, with_oracle=args.oracle)
            ]
        elif args.command == "sweep":
            if args.points < 1:
                print("error: --points must be >= 1", file=sys.stderr)
                return EXIT_USAGE
            rows = pipeline.sweep_scenario(
                scenario, args.axis, args.start, args.stop, args.points,
                mode=args.mode, with_oracle=args.oracle,
            )
        else:  # simulate
            rows = [
                pipeline.simulate_scenario(
                    scenario, args.kind, args.seed, args.trials, args.window_radius
                )
            ]
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CachintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    write_csv(rows, args.out)

    plot = getattr(args, "plot", None)
    if plot:
        from . import report

        try:
            if args.command == "sweep":
                report.render_sweep_figure(rows, plot)
            else:
                report.render_rows_figure(rows, plot)
        except ValueError as exc:
            print(f"plot skipped: {exc}", file=sys.stderr)

    if all(row.get("status") == "infeasible" for row in rows if "status" in row) and any(
        "status" in row for row in rows
    ):
        return EXIT_INFEASIBLE
    return EXIT_OK


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
