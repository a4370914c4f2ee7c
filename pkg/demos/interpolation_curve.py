"""Sweep epsilon and watch the divergence move between its two limits.

For small epsilon the proximal divergence behaves like epsilon * KL(a || b);
for large epsilon it saturates at the exact transport cost. Both ends are
printed next to the curve, together with the certified gap of every solve.

    python3 demos/interpolation_curve.py [--seed 0]
"""

import argparse

import numpy as np

from proxot import DiscreteMeasure, build_cost, kl_divergence, ot_cost, solve_curve


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=30)
    args = ap.parse_args()

    rng = np.random.Generator(np.random.Philox(args.seed))
    x = rng.standard_normal((args.n, 2))
    # same points, different weights: both limits are finite
    P = DiscreteMeasure(x, rng.dirichlet(np.full(args.n, 2.0)))
    Q = DiscreteMeasure(x, rng.dirichlet(np.full(args.n, 2.0)))
    C = np.asarray(build_cost(P, Q))
    med = float(np.median(C))
    T = ot_cost(P.weights, Q.weights, C)
    kl = kl_divergence(P.weights, Q.weights)

    grid = np.geomspace(1e-3 * med, 1e3 * med, 13)
    sols = solve_curve(P.weights, Q.weights, C, grid)
    print(f"exact transport cost T = {T:.6f}   KL(a||b) = {kl:.6f}")
    print(f"{'eps':>10} {'D':>12} {'D/eps':>12} {'min(T, eps KL)':>15} {'gap':>10}")
    for e, s in zip(grid, sols):
        print(f"{e:10.4g} {s.divergence:12.6f} {s.divergence / e:12.6f} {min(T, e * kl):15.6f} {s.gap:10.2e}")


if __name__ == "__main__":
    main()
