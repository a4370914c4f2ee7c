"""Exact discrete optimal transport with Kantorovich potentials."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._simplex import network_simplex
from .measures import CostSpec, DiscreteMeasure, build_cost


@dataclass(frozen=True, eq=False)
class TransportPlan:
    plan: np.ndarray
    value: float


@dataclass(frozen=True, eq=False)
class DualPotentials:
    """Pair with ``phi[i] + psi[j] <= C[i, j]``."""

    phi: np.ndarray
    psi: np.ndarray

    def max_violation(self, C):
        C = np.asarray(C, dtype=np.float64)
        return float(np.max(self.phi[:, None] + self.psi[None, :] - C))

    def dual_value(self, a, b):
        return float(np.dot(a, self.phi) + np.dot(b, self.psi))


def _check_marginal(w, name):
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    if w.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError(f"{name} must be finite and nonnegative")
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValueError(f"{name} must sum to 1, got {w.sum()!r}")
    return w


def _check_cost(C, shape):
    C = np.asarray(C, dtype=np.float64)
    if C.shape != shape:
        raise ValueError(f"cost has shape {C.shape}, expected {shape}")
    if not np.all(np.isfinite(C)):
        raise OverflowError("cost matrix contains non-finite entries")
    if np.any(C < 0):
        raise ValueError("cost matrix must be nonnegative")
    return np.ascontiguousarray(C)


def solve_exact_ot(a, b, C, tol=None, max_pivots=None):
    """Optimal plan and potentials for ``min <C, pi>`` over couplings of ``a``, ``b``.

    Potentials are gauged so that ``psi[-1] == 0``.
    """
    a = _check_marginal(a, "a")
    b = _check_marginal(b, "b")
    C = _check_cost(C, (a.size, b.size))
    n, m = C.shape
    # exact balance for the tree flows
    b = b * (a.sum() / b.sum())
    scale = max(1.0, float(C.max()))
    if tol is None:
        tol = 1e-12 * scale
    if max_pivots is None:
        max_pivots = max(100_000, 50 * n * m)
    order = np.argsort(C, axis=None, kind="stable")
    bi, bj, bf, u, v, pivots, status = network_simplex(a, b, C, order, float(tol), int(max_pivots))
    if status != 0:
        raise RuntimeError(f"network simplex hit the pivot budget ({max_pivots})")
    plan = np.zeros((n, m))
    np.add.at(plan, (bi, bj), bf)
    value = float(np.sum(C[bi, bj] * bf))
    return TransportPlan(plan, value), DualPotentials(u, v)


def ot_cost(a, b, C):
    return solve_exact_ot(a, b, C)[0].value


def wasserstein_p(P: DiscreteMeasure, Q: DiscreteMeasure, p=2.0):
    if p < 1:
        raise ValueError("p must be >= 1")
    C = build_cost(P, Q, CostSpec.power(p))
    value = ot_cost(P.weights, Q.weights, C)
    return max(value, 0.0) ** (1.0 / p)
