"""Closed-form Gaussian divergence against a discretized solve.

The proximal problem between two 1D Gaussians has an explicit minimizer
R = N(m_R, sigma_R^2). Discretizing both densities on a fine grid and running
the discrete solver should land close to the same value.

    python3 demos/gaussian_check.py [--points 400] [--eps 2]
"""

import argparse
import time

import numpy as np

from proxot import DiscreteMeasure, Gaussian1D, build_cost, proximal_gaussian_1d, solve_proximal


def grid_measure(x, g):
    w = np.exp(-0.5 * ((x - g.mean) / g.std) ** 2)
    return DiscreteMeasure(x, w / w.sum())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=400)
    ap.add_argument("--eps", type=float, default=2.0)
    ap.add_argument("--m2", type=float, default=2.0)
    ap.add_argument("--s2", type=float, default=1.0)
    args = ap.parse_args()

    P, Q = Gaussian1D(0.0, 1.0), Gaussian1D(args.m2, args.s2)
    value, R = proximal_gaussian_1d(P, Q, args.eps)
    print(f"closed form: D = {value:.6f}, R = N({R.mean:.6f}, {R.std:.6f}^2)")

    lo = min(P.mean - 6 * P.std, Q.mean - 6 * Q.std)
    hi = max(P.mean + 6 * P.std, Q.mean + 6 * Q.std)
    x = np.linspace(lo, hi, args.points)
    Pd, Qd = grid_measure(x, P), grid_measure(x, Q)
    t0 = time.perf_counter()
    sol = solve_proximal(Pd.weights, Qd.weights, np.asarray(build_cost(Pd, Qd)), args.eps)
    secs = time.perf_counter() - t0
    w = sol.weights_w
    m = float(w @ x)
    s = float(np.sqrt(w @ (x - m) ** 2))
    print(f"discrete:    D = {sol.divergence:.6f} (gap {sol.gap:.1e}, {secs:.2f} s), "
          f"w has mean {m:.4f} and std {s:.4f}")
    print(f"relative difference {abs(sol.divergence - value) / value:.2e}")


if __name__ == "__main__":
    main()
