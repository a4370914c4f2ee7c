"""Closed-form proximal divergence (squared-distance cost, KL) for Gaussians."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Gaussian1D:
    mean: float
    std: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.std)):
            raise ValueError("mean and std must be finite")
        if not self.std > 0:
            raise ValueError(f"std must be positive, got {self.std}")


@dataclass(frozen=True, eq=False)
class GaussianDiag:
    """Gaussian with diagonal covariance ``diag(std**2)``."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.mean, dtype=np.float64))
        s = np.atleast_1d(np.asarray(self.std, dtype=np.float64))
        if m.shape != s.shape or m.ndim != 1:
            raise ValueError("mean and std must be 1D arrays of equal length")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(s))):
            raise ValueError("mean and std must be finite")
        if np.any(s <= 0):
            raise ValueError("all stds must be positive")
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "std", s)

    @property
    def dim(self):
        return self.mean.size

    @classmethod
    def from_covariance(cls, mean, cov):
        cov = np.asarray(cov, dtype=np.float64)
        if not np.allclose(cov, np.diag(np.diag(cov))):
            raise ValueError("only diagonal covariances are supported")
        return cls(mean, np.sqrt(np.diag(cov)))

    def marginal(self, k):
        return Gaussian1D(float(self.mean[k]), float(self.std[k]))


def _check_eps(eps):
    if not (math.isfinite(eps) and eps > 0):
        raise ValueError(f"eps must be positive and finite, got {eps}")


def proximal_gaussian_1d(P: Gaussian1D, Q: Gaussian1D, eps: float):
    """Divergence and optimal intermediate Gaussian R for 1D Gaussians.

    With ``k = eps / (2 sigma_Q^2)``:

        m_R     = (m_P + k m_Q) / (1 + k)
        sigma_R = (sigma_P + sqrt(sigma_P^2 + 2 eps (1 + k))) / (2 (1 + k))
        D       = k/(1+k) (m_P - m_Q)^2 + sigma_P (sigma_P - sigma_R)
                  + eps log(sigma_Q / sigma_R)
    """
    _check_eps(eps)
    m1, s1, m2, s2 = P.mean, P.std, Q.mean, Q.std
    k = eps / (2.0 * s2 * s2)
    m_r = (m1 + k * m2) / (1.0 + k)
    # positive root of (2 + eps/s2^2) s^2 - 2 s1 s - eps = 0
    s_r = (s1 + math.sqrt(s1 * s1 + 2.0 * eps * (1.0 + k))) / (2.0 * (1.0 + k))
    value = k / (1.0 + k) * (m1 - m2) ** 2 + s1 * (s1 - s_r) + eps * math.log(s2 / s_r)
    # exact zero for P == Q; rounding would otherwise leave ~1e-16 of either sign
    if m1 == m2 and s1 == s2:
        value = 0.0
    return value, Gaussian1D(m_r, s_r)


def proximal_gaussian_diag(P: GaussianDiag, Q: GaussianDiag, eps: float):
    """Coordinatewise application of the 1D formula; divergences add up."""
    if P.dim != Q.dim:
        raise ValueError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    total = 0.0
    means = np.empty(P.dim)
    stds = np.empty(P.dim)
    for k in range(P.dim):
        value, r = proximal_gaussian_1d(P.marginal(k), Q.marginal(k), eps)
        total += value
        means[k], stds[k] = r.mean, r.std
    return total, GaussianDiag(means, stds)


def gaussian_interpolant_curve(P, Q, eps_list):
    """Rows ``(eps, m_R, sigma_R, divergence)`` for plotting R across eps."""
    rows = []
    for eps in eps_list:
        value, r = proximal_gaussian_1d(P, Q, float(eps))
        rows.append((float(eps), r.mean, r.std, value))
    return rows


def gaussian_diag_curve(P, Q, eps_list):
    rows = []
    for eps in eps_list:
        value, r = proximal_gaussian_diag(P, Q, float(eps))
        rows.append((float(eps), r.mean.copy(), r.std.copy(), value))
    return rows


def stationarity_residual(P: Gaussian1D, Q: Gaussian1D, eps: float, s_r: float):
    """First-order condition in sigma_R of W2^2 + eps KL; zero at the optimum."""
    return 2.0 * (s_r - P.std) - eps / s_r + eps * s_r / Q.std**2


def _w2_squared_1d(P: Gaussian1D, Q: Gaussian1D):
    return (P.mean - Q.mean) ** 2 + (P.std - Q.std) ** 2


def _kl_1d(P: Gaussian1D, Q: Gaussian1D):
    return math.log(Q.std / P.std) + (P.std**2 + (P.mean - Q.mean) ** 2) / (2 * Q.std**2) - 0.5
