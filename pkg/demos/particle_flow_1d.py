"""Particles sliding from N(-2, 0.5^2) to N(2, 1) under the proximal discriminator.

Prints the certified divergence and the energy distance to the targets every
few steps, then text histograms of the start and end clouds.

    python3 demos/particle_flow_1d.py [--steps 120] [--n 150] [--seed 0]
"""

import argparse

import numpy as np

from proxot import DiscreteMeasure, FlowConfig, energy_distance, run_flow, sample_gaussian


def histogram(values, lo=-4.0, hi=5.0, bins=36, width=40):
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    scale = width / max(counts.max(), 1)
    for c, e in zip(counts, edges):
        print(f"{e:6.2f} | {'#' * int(round(c * scale))}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=120)
    ap.add_argument("--n", type=int, default=150)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eps", type=float, default=0.5)
    args = ap.parse_args()

    src = DiscreteMeasure(sample_gaussian(-2.0, 0.5, args.n, args.seed))
    tgt = DiscreteMeasure(sample_gaussian(2.0, 1.0, args.n, args.seed + 1))
    cfg = FlowConfig(epsilon=args.eps, step_dt=0.05, num_steps=args.steps, snapshot_every=20)
    state = run_flow(src, tgt, cfg)

    by_step = {r.step: r for r in state.history}
    print(f"{'step':>5} {'divergence':>12} {'energy':>10}")
    for step, pts in state.snapshots:
        ed = energy_distance(DiscreteMeasure(pts), tgt)
        print(f"{step:5d} {by_step[step].divergence:12.6f} {ed:10.6f}")
    print("\nstart")
    histogram(src.points[:, 0])
    print("\nend")
    histogram(state.particles[:, 0])
    print("\ntargets")
    histogram(tgt.points[:, 0])


if __name__ == "__main__":
    main()
