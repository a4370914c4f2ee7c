"""Extended dual potential on all of R^d and its spatial gradient.

Given the optimal column potential ``psi`` on the target points ``y_j``, the
discriminator is ``phi(x) = min_j c(x, y_j) - psi_j``. Its gradient drives the
particle flow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import CostSpec
from .prox_solver import c_transform, cbar_transform

__all__ = ["Discriminator", "c_transform", "cbar_transform"]

# scores this close (relative) to the minimum count as ties; split-mass particles
# sit exactly on tie sets and rounding must not pick the branch
TIE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Discriminator:
    target_points: np.ndarray
    psi_values: np.ndarray
    cost: CostSpec = CostSpec.power(2.0)

    def __post_init__(self):
        y = np.asarray(self.target_points, dtype=np.float64)
        if y.ndim == 1:
            y = y[:, None]
        psi = np.asarray(self.psi_values, dtype=np.float64).reshape(-1)
        if psi.shape[0] != y.shape[0]:
            raise ValueError(f"{psi.shape[0]} potentials for {y.shape[0]} target points")
        if not np.all(np.isfinite(psi)):
            raise ValueError("potentials must be finite")
        if self.cost.kind != "power":
            raise ValueError("discriminator needs a power cost")
        y = y.copy()
        y.setflags(write=False)
        psi = psi.copy()
        psi.setflags(write=False)
        object.__setattr__(self, "target_points", y)
        object.__setattr__(self, "psi_values", psi)

    @property
    def dim(self):
        return self.target_points.shape[1]

    def _as_batch(self, x):
        x = np.asarray(x, dtype=np.float64)
        single = False
        if x.ndim == 0:
            x, single = x.reshape(1, 1), True
        elif x.ndim == 1 and x.shape[0] == self.dim:
            x, single = x[None, :], True
        elif x.ndim == 1 and self.dim == 1:
            # a flat array of 1D points
            x = x[:, None]
        if x.ndim != 2 or x.shape[1] != self.dim:
            raise ValueError(f"query of shape {x.shape} does not match {self.dim}-D targets")
        return x, single

    def _scores(self, x):
        return self.cost.pairwise(x, self.target_points) - self.psi_values[None, :]

    def _select(self, scores):
        lo = scores.min(axis=1, keepdims=True)
        tol = TIE_RTOL * (1.0 + np.abs(scores).max(axis=1, keepdims=True))
        return np.argmax(scores <= lo + tol, axis=1)

    def evaluate(self, x):
        """``min_j c(x, y_j) - psi_j`` for a point (d,) or a batch (n, d)."""
        x, single = self._as_batch(x)
        vals = self._scores(x).min(axis=1)
        return float(vals[0]) if single else vals

    def selected(self, x):
        """Index of the minimizing target (smallest index on ties)."""
        x, single = self._as_batch(x)
        idx = self._select(self._scores(x))
        return int(idx[0]) if single else idx

    def gradient(self, x):
        """Envelope gradient ``p |x - y*|^(p-2) (x - y*)`` at the selected target."""
        p = self.cost.p
        if p <= 1:
            raise ValueError("gradient needs p > 1 (the p = 1 cost is not differentiable)")
        x, single = self._as_batch(x)
        idx = self._select(self._scores(x))
        diff = x - self.target_points[idx]
        if p == 2:
            grad = 2.0 * diff
        else:
            dist = np.linalg.norm(diff, axis=1)
            at_target = dist == 0
            if p < 2 and np.any(at_target):
                raise ValueError("gradient is unbounded at a target point for 1 < p < 2")
            scale = np.zeros_like(dist)
            scale[~at_target] = p * dist[~at_target] ** (p - 2)
            grad = scale[:, None] * diff
        return grad[0] if single else grad
