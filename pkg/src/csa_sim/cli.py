"""Command-line front end: ``csa-sim simulate|model|analyze|compare``.

Exit codes: 0 success, 2 configuration or schema error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from csa_sim.analysis import analyze_trace, compare_modes
from csa_sim.errors import ConfigError, InvalidInputError, InvalidParameterError
from csa_sim.scenario import Scenario, load_scenario
from csa_sim.traceio import comparison_lines, comparison_to_csv, read_trace, report_lines, write_trace

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def _max_workers(jobs: int) -> int:
    cap = os.environ.get("CSA_SIM_THREADS")
    limit = int(cap) if cap and cap.isdigit() and int(cap) > 0 else (os.cpu_count() or 1)
    return max(1, min(jobs, limit))


def _ensemble(scenario: Scenario, args) -> list[tuple[int | None, Scenario]]:
    """Seed-ordered list of ``(seed tag, scenario)``; the tag is None for a single run."""
    scenario = scenario.with_seeds(args.seed, args.noise_seed)
    size = args.ensemble if args.ensemble is not None else scenario.ensemble
    if size < 1:
        raise ConfigError("--ensemble must be >= 1")
    if size == 1:
        return [(None, scenario)]
    base, noise = scenario.field.seed, scenario.noise_seed
    return [(base + i, scenario.with_seeds(base + i, noise + i)) for i in range(size)]


def _out_name(scenario: Scenario, mode: str, tag) -> str:
    return f"{scenario.name}_{mode}.csv" if tag is None else f"{scenario.name}_seed{tag}_{mode}.csv"


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.config)
    modes = tuple(args.mode) if args.mode else scenario.modes
    runs = _ensemble(scenario, args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(tag, sc, mode) for tag, sc in runs for mode in modes]

    def work(job):
        tag, sc, mode = job
        return write_trace(sc.simulate(mode), out_dir / _out_name(sc, mode, tag))

    with ThreadPoolExecutor(_max_workers(len(jobs))) as pool:
        # map() preserves the seed-sorted job order
        paths = list(pool.map(work, jobs))
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_model(args) -> int:
    scenario = load_scenario(args.config)
    runs = _ensemble(scenario, args)
    out = Path(args.out)
    if out.suffix == ".csv" and len(runs) == 1:
        targets = [out]
        out.parent.mkdir(parents=True, exist_ok=True)
    else:
        out.mkdir(parents=True, exist_ok=True)
        targets = [out / _out_name(sc, "model", tag) for tag, sc in runs]

    def work(item):
        (_, sc), target = item
        return write_trace(sc.generate_model(), target)

    with ThreadPoolExecutor(_max_workers(len(runs))) as pool:
        paths = list(pool.map(work, zip(runs, targets)))
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_analyze(args) -> int:
    traces = [read_trace(p) for p in args.traces]
    reports = [analyze_trace(t, epsilon=args.epsilon, max_lag=args.max_lag) for t in traces]
    lines = []
    if len(reports) == 1:
        lines += report_lines(reports[0])
    else:
        for i, (path, rep) in enumerate(zip(args.traces, reports)):
            lines.append(f"trace.{i}.path = {path}")
            lines += report_lines(rep, prefix=f"trace.{i}.")
        depths = np.array([r.fade_depth_db for r in reports])
        lines += [
            f"ensemble.size = {len(reports)}",
            f"ensemble.fade_depth_db.median = {float(np.median(depths))!r}",
            f"ensemble.fade_depth_db.p10 = {float(np.percentile(depths, 10))!r}",
            f"ensemble.fade_depth_db.p90 = {float(np.percentile(depths, 90))!r}",
            f"ensemble.fade_depth_db.frac_above_20 = {float(np.mean(depths > 20.0))!r}",
        ]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    for path, rep in zip(args.traces, reports):
        print(f"{path}: {rep.summary()}")
    if len(reports) > 1:
        depths = np.array([r.fade_depth_db for r in reports])
        print(
            f"fade depth over {len(reports)} traces: median {np.median(depths):.2f} dB, "
            f"{100 * np.mean(depths > 20.0):.0f}% above 20 dB"
        )
    return EXIT_OK


def cmd_compare(args) -> int:
    traces = [read_trace(p) for p in args.traces]
    rows = compare_modes(traces)
    if args.out:
        out = Path(args.out)
        text = comparison_to_csv(rows) if out.suffix == ".csv" else "\n".join(comparison_lines(rows)) + "\n"
        out.write_text(text, encoding="utf-8")
    print(f"{'mode':<11}{'fade dB':>9}{'tot.var':>10}{'int.var':>11}{'int.fade dB':>13}{'intervals':>11}")
    for r in rows:
        print(
            f"{r.mode:<11}{r.fade_depth_db:>9.2f}{r.total_variation:>10.3f}{r.mean_interval_variance:>11.3g}"
            f"{r.max_interval_fade_db:>13.2f}{r.num_intervals:>11d}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csa-sim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def seeds(p):
        p.add_argument("--seed", type=int, help="override field (and model) seed")
        p.add_argument("--noise-seed", type=int, help="override residual-noise seed")
        p.add_argument("--ensemble", type=int, help="run N consecutive seeds")

    p = sub.add_parser("simulate", help="trace the field for each antenna mode")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--mode", action="append", choices=("regular", "csa", "stationary"))
    seeds(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("model", help="sample the piecewise-static statistical model")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output .csv file or directory")
    seeds(p)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("analyze", help="report fade depth, intervals, K and residual spread")
    p.add_argument("traces", nargs="+")
    p.add_argument("--out", help="key-value report file")
    p.add_argument("--epsilon", type=float, help="segment by change detection instead of stored ids")
    p.add_argument("--max-lag", type=int, default=50)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="tabulate staticness metrics across modes")
    p.add_argument("traces", nargs="+")
    p.add_argument("--out", help="comparison table (.csv) or key-value file")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidParameterError, InvalidInputError) as exc:
        print(f"csa-sim: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"csa-sim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
