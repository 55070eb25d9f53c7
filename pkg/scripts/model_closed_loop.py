#!/usr/bin/env python3
"""Generate piecewise-static model traces and fit them back, over a grid of (K, sigma_N)."""
import argparse
import itertools

from csa_sim import PiecewiseStaticModel, RiceInitial, fit_model, generate_model_trace


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--intervals", type=int, default=10_000)
    ap.add_argument("--samples", type=int, default=100, help="samples per interval")
    ap.add_argument("--k", type=float, nargs="+", default=[0.0, 1.0, 4.0, 10.0])
    ap.add_argument("--sigma", type=float, nargs="+", default=[0.02, 0.05])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    step = 1.0 / args.samples
    print(f"{'K':>6}{'sigma':>8}{'K_hat':>9}{'Omega_hat':>11}{'sigma_hat':>11}")
    for k, sigma in itertools.product(args.k, args.sigma):
        model = PiecewiseStaticModel(1.0, RiceInitial(k, 1.0), sigma, seed=args.seed)
        fit = fit_model(generate_model_trace(model, float(args.intervals), step))
        print(f"{k:>6g}{sigma:>8g}{fit.k_hat:>9.3f}{fit.omega_hat:>11.3f}{fit.sigma_hat:>11.4f}")


if __name__ == "__main__":
    main()
