"""Discrete probability measures, ground costs and measure transformations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SIMPLEX_TOL = 1e-9
ORTHOGONALITY_TOL = 1e-10


def _frozen(arr):
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weighted point cloud ``sum_i w_i delta_{x_i}`` in R^d.

    ``points`` may be given as shape (n,) for 1D data; it is stored as (n, d).
    ``weights`` default to uniform. A weight vector whose sum is within 1e-9
    of one is renormalized; anything further off is rejected (use
    :meth:`from_unnormalized` for raw counts).
    """

    points: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"points must be a non-empty (n, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite coordinates")
        n = pts.shape[0]
        if self.weights is None:
            w = np.full(n, 1.0 / n)
        else:
            w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
            if w.shape[0] != n:
                raise ValueError(f"got {w.shape[0]} weights for {n} points")
            if not np.all(np.isfinite(w)):
                raise ValueError("weights contain non-finite values")
            if np.any(w < 0):
                raise ValueError("weights must be nonnegative")
            total = w.sum()
            if abs(total - 1.0) > SIMPLEX_TOL:
                raise ValueError(f"weights sum to {total!r}, not 1 (tolerance {SIMPLEX_TOL})")
            w = w / total
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def from_unnormalized(cls, points, weights):
        w = np.asarray(weights, dtype=np.float64)
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        total = w.sum()
        if total <= 0:
            raise ValueError("weights must have positive total mass")
        return cls(points, w / total)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"DiscreteMeasure(n={self.n}, dim={self.dim})"


@dataclass(frozen=True)
class CostSpec:
    """Ground cost: ``|x - y|_2 ** p`` (``kind="power"``) or an explicit matrix."""

    kind: str = "power"
    p: float = 2.0
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind == "power":
            if not np.isfinite(self.p) or self.p < 1:
                raise ValueError(f"power cost needs p >= 1, got {self.p}")
        elif self.kind == "matrix":
            if self.matrix is None:
                raise ValueError("explicit cost needs a matrix")
            m = np.asarray(self.matrix, dtype=np.float64)
            if m.ndim != 2 or not np.all(np.isfinite(m)) or np.any(m < 0):
                raise ValueError("explicit cost matrix must be 2D, finite and nonnegative")
            object.__setattr__(self, "matrix", _frozen(m))
        else:
            raise ValueError(f"unknown cost kind {self.kind!r}")

    @classmethod
    def power(cls, p=2.0):
        return cls("power", float(p))

    @classmethod
    def explicit(cls, matrix):
        return cls("matrix", matrix=matrix)

    def pairwise(self, x, y):
        """Cost between every row of ``x`` (n, d) and every row of ``y`` (m, d)."""
        if self.kind != "power":
            raise ValueError("pairwise evaluation needs a power cost")
        diff = x[:, None, :] - y[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        if self.p == 1:
            return dist
        if self.p == 2:
            return np.einsum("ijk,ijk->ij", diff, diff)
        return dist**self.p


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """N x M ground-cost matrix; behaves like an ndarray via ``__array__``."""

    entries: np.ndarray
    row_points: str = "P"
    col_points: str = "Q"

    def __post_init__(self):
        c = np.asarray(self.entries, dtype=np.float64)
        if c.ndim != 2 or c.size == 0:
            raise ValueError(f"cost must be a non-empty 2D array, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise OverflowError("cost matrix contains non-finite entries")
        if np.any(c < 0):
            raise ValueError("cost matrix must be nonnegative")
        object.__setattr__(self, "entries", _frozen(c))

    @property
    def shape(self):
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)


def build_cost(P: DiscreteMeasure, Q: DiscreteMeasure, spec: CostSpec | None = None) -> CostMatrix:
    spec = CostSpec.power(2.0) if spec is None else spec
    if spec.kind == "matrix":
        if spec.matrix.shape != (P.n, Q.n):
            raise ValueError(f"explicit cost has shape {spec.matrix.shape}, measures need {(P.n, Q.n)}")
        return CostMatrix(spec.matrix)
    if P.dim != Q.dim:
        raise ValueError(f"dimension mismatch: P is {P.dim}-D, Q is {Q.dim}-D")
    with np.errstate(over="raise"):
        try:
            c = spec.pairwise(P.points, Q.points)
        except FloatingPointError as exc:
            raise OverflowError("cost overflow") from exc
    return CostMatrix(c)


@dataclass(frozen=True, eq=False)
class IsometryMap:
    """Rigid motion ``x -> O x + s`` with O orthogonal."""

    orthogonal: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        o = np.atleast_2d(np.asarray(self.orthogonal, dtype=np.float64))
        s = np.asarray(self.shift, dtype=np.float64).reshape(-1)
        d = o.shape[0]
        if o.shape != (d, d) or s.shape != (d,):
            raise ValueError("orthogonal must be (d, d) and shift (d,)")
        if not np.allclose(o.T @ o, np.eye(d), rtol=0, atol=ORTHOGONALITY_TOL):
            raise ValueError("matrix is not orthogonal")
        object.__setattr__(self, "orthogonal", _frozen(o))
        object.__setattr__(self, "shift", _frozen(s))

    @property
    def dim(self):
        return self.shift.shape[0]

    @classmethod
    def identity(cls, d):
        return cls(np.eye(d), np.zeros(d))

    @classmethod
    def random(cls, d, rng):
        """Haar-random orthogonal matrix (QR with sign fix) and Gaussian shift."""
        q, r = np.linalg.qr(rng.standard_normal((d, d)))
        q = q * np.sign(np.diag(r))
        return cls(q, rng.standard_normal(d))

    def apply(self, x):
        return np.asarray(x, dtype=np.float64) @ self.orthogonal.T + self.shift


def pushforward(P: DiscreteMeasure, T: IsometryMap) -> DiscreteMeasure:
    if T.dim != P.dim:
        raise ValueError(f"map acts on R^{T.dim}, measure lives in R^{P.dim}")
    return DiscreteMeasure(T.apply(P.points), P.weights)


def product_measure(P1: DiscreteMeasure, P2: DiscreteMeasure) -> DiscreteMeasure:
    """Product measure on concatenated coordinates, P1 index varying slowest."""
    n1, n2 = P1.n, P2.n
    pts = np.hstack([np.repeat(P1.points, n2, axis=0), np.tile(P2.points, (n1, 1))])
    w = np.outer(P1.weights, P2.weights).reshape(-1)
    return DiscreteMeasure(pts, w / w.sum())


def uniform(points) -> DiscreteMeasure:
    return DiscreteMeasure(points)
