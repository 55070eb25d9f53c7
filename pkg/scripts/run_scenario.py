#!/usr/bin/env python3
"""Simulate regular, CSA and stationary antennas over one scenario and print a comparison.

    python scripts/run_scenario.py configs/linear6.toml --out runs/linear6
"""
import argparse
from pathlib import Path

from csa_sim.analysis import compare_modes
from csa_sim.scenario import load_scenario
from csa_sim.traceio import write_trace


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config", type=Path)
    ap.add_argument("--out", type=Path, default=None, help="directory for per-mode CSV traces")
    args = ap.parse_args()

    scenario = load_scenario(args.config)
    traces = [scenario.simulate(mode) for mode in scenario.modes]
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        for tr in traces:
            write_trace(tr, args.out / f"{scenario.name}_{tr.mode}.csv")

    print(f"{'mode':<11}{'fade dB':>9}{'TV':>9}{'intervals':>11}{'max int. fade dB':>18}")
    for row in compare_modes(traces):
        print(f"{row.mode:<11}{row.fade_depth_db:>9.2f}{row.total_variation:>9.3f}"
              f"{row.num_intervals:>11}{row.max_interval_fade_db:>18.2f}")


if __name__ == "__main__":
    main()
