"""Command-line front door: simulate, sweep, expense-table.

Each command writes CSV output plus rendered figures into the output
directory. Scenario arguments accept either a file path or the name of a
bundled scenario (e.g. `alliance_campaign`).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import engine, expense, report
from .scenario import ScenarioError, bundled_scenario_path, load_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _resolve_scenario(arg: str):
    path = Path(arg)
    if path.is_file():
        return path
    try:
        return bundled_scenario_path(arg)
    except FileNotFoundError:
        raise FileNotFoundError(f"scenario {arg!r}: not a file or bundled name")


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8", newline="")
    tmp.replace(path)


def cmd_simulate(args) -> int:
    out_dir = Path(args.out)
    try:
        path = _resolve_scenario(args.scenario)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    try:
        scenario = load_scenario(path, overrides)
        metrics = engine.run(scenario)
    except ScenarioError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = Path(args.scenario).stem
        _write_atomic(
            out_dir / f"{stem}_metrics.csv",
            report.metrics_csv(metrics, scenario.scenario_hash),
        )
        summary = report.summary_text(metrics, scenario.scenario_hash)
        _write_atomic(out_dir / f"{stem}_summary.txt", summary)
        report.plot_metrics(metrics, out_dir / f"{stem}_metrics.png", title=stem)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(summary, end="")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        counts = sorted({int(c) for c in args.defenders.split(",")})
    except ValueError:
        print(f"error: bad --defenders list {args.defenders!r}", file=sys.stderr)
        return EXIT_VALIDATION
    out_dir = Path(args.out)
    try:
        path = _resolve_scenario(args.scenario)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    results = {}
    scenario_hash = ""
    for count in counts:
        overrides = {"defender_count_active": count}
        if args.seed is not None:
            overrides["seed"] = args.seed
        try:
            scenario = load_scenario(path, overrides)
            results[count] = engine.run(scenario)
        except ScenarioError as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        scenario_hash = scenario.scenario_hash
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = Path(args.scenario).stem
        for count, metrics in results.items():
            _write_atomic(
                out_dir / f"{stem}_{count}defender_metrics.csv",
                report.metrics_csv(metrics, scenario_hash),
            )
        _write_atomic(
            out_dir / f"{stem}_comparison.csv",
            report.sweep_csv(results, scenario_hash),
        )
        report.plot_sweep(results, out_dir / f"{stem}_comparison.png")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(report.sweep_csv(results, scenario_hash), end="")

    # collaboration must strictly help; anything else is a model defect
    ordered = [results[c] for c in sorted(results)]
    for prev, cur in zip(ordered, ordered[1:]):
        if not (
            cur.mean("primary_util") < prev.mean("primary_util")
            and cur.mean("latency") < prev.mean("latency")
        ):
            print(
                "error: collaboration benefit ordering violated across defender "
                "counts; inspect the scenario's load model parameters",
                file=sys.stderr,
            )
            return EXIT_VALIDATION
    return EXIT_OK


def cmd_expense_table(args) -> int:
    try:
        pricing = expense.BotnetPricing(
            setup_per_bot="0",
            rental_per_bot_per_lease=str(args.rental),
            lease_duration=str(args.lease_hours),
            min_bots=1000,
        )
        mitigation = expense.MitigationProfile(mrt=str(args.mrt_hours))
        table = expense.expense_table(
            args.m, args.n, args.low, args.high, args.seed,
            pricing=pricing, mitigation=mitigation,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    params_hash = f"m{args.m}n{args.n}lo{args.low}hi{args.high}s{args.seed}"
    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_atomic(
            out_dir / "expense_table.csv",
            table.to_csv(f"edgecombat v{report.TOOL_VERSION} params={params_hash}"),
        )
        report.plot_amplification(table, out_dir / "expense_table.png")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(report.amplification_table_text(table), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgecombat",
        description="Economical DDoS combat simulator with joint defense",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one scenario")
    p_sim.add_argument("scenario", help="scenario file or bundled name")
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--out", default="out")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="compare defender counts on one scenario")
    p_sweep.add_argument("scenario", help="scenario file or bundled name")
    p_sweep.add_argument("--defenders", required=True, help="e.g. 1,2,3")
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--out", default="out")
    p_sweep.set_defaults(func=cmd_sweep)

    p_table = sub.add_parser(
        "expense-table", help="random defense matrix and amplification factors"
    )
    p_table.add_argument("-m", type=int, required=True, help="defender count")
    p_table.add_argument("-n", type=int, required=True, help="vulnerability count")
    p_table.add_argument("--low", type=float, required=True)
    p_table.add_argument("--high", type=float, required=True)
    p_table.add_argument("--seed", type=int, required=True)
    p_table.add_argument("--rental", type=float, default=0.06)
    p_table.add_argument("--lease-hours", type=float, default=336)
    p_table.add_argument("--mrt-hours", type=float, default=1)
    p_table.add_argument("--out", default="out")
    p_table.set_defaults(func=cmd_expense_table)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
