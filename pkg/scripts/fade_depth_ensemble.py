#!/usr/bin/env python3
"""Fade depth of a moving regular antenna across many Rayleigh field seeds.

Also reports the fade depth a CSA sees across its static interval values,
which is bounded by how far apart the anchors happen to sit in the field.
"""
import argparse

import numpy as np

from csa_sim import AntennaMount, FieldParams, fade_depth, linear_trajectory, run_mode, synthesize_field


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--k-factor", type=float, default=0.0)
    ap.add_argument("--paths", type=int, default=256)
    ap.add_argument("--distance", type=float, default=6.0)
    ap.add_argument("--step", type=float, default=0.01)
    args = ap.parse_args()

    traj = linear_trajectory(args.distance, args.step)
    mount = AntennaMount()
    reg, csa = [], []
    for seed in range(args.seeds):
        field = synthesize_field(FieldParams(args.k_factor, args.paths, seed=seed))
        reg.append(fade_depth(run_mode(field, traj, mount, "regular")))
        csa.append(fade_depth(run_mode(field, traj, mount, "csa")))
    reg, csa = np.array(reg), np.array(csa)

    for name, d in (("regular", reg), ("csa", csa)):
        q10, q50, q90 = np.percentile(d, [10, 50, 90])
        print(f"{name:<8} median {q50:6.1f} dB  p10 {q10:6.1f}  p90 {q90:6.1f}  "
              f">20 dB in {100 * np.mean(d > 20):5.1f}% of seeds")


if __name__ == "__main__":
    main()
