"""Proximal optimal-transport divergence between discrete measures.

The divergence is

    D_eps(P || Q) = min_w  T_C(a, w) + eps * KL(w || b),

the infimal convolution of the transport cost with ``eps`` times KL, where
``w`` ranges over probability vectors on the support of Q. Its dual is

    max_{phi + psi <= C}  <a, phi> - eps * log sum_j b_j exp(-psi_j / eps).

:func:`solve_proximal` works on an entropically smoothed version of the dual
(smoothing ``eta``, annealed towards zero), then turns the smoothed potential
into a feasible dual pair and a feasible primal point, so every answer comes
with a certified interval ``[dual_value, primal_value]``.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp, xlogy

from .exact_ot import DualPotentials, TransportPlan, _check_cost, _check_marginal, solve_exact_ot

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs for :func:`solve_proximal`.

    ``eta_start``/``eta_end`` of ``None`` mean ``median(C)`` and
    ``1e-3 * median(C)``. After the schedule reaches ``eta_end`` the
    smoothing keeps shrinking (at most ``extra_stages`` times, never below
    ``eta_floor * median(C)``) until the relative gap drops under ``gap_tol``.
    """

    eta_start: float | None = None
    eta_end: float | None = None
    anneal_factor: float = 0.5
    max_iterations: int = 500
    convergence_tol: float = 1e-10
    polish: bool = True
    gap_tol: float = 1e-9
    extra_stages: int = 30
    eta_floor: float = 1e-12

    def __post_init__(self):
        if not 0 < self.anneal_factor < 1:
            raise ValueError("anneal_factor must lie in (0, 1)")
        for name in ("eta_start", "eta_end"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ValueError(f"{name} must be positive")
        if self.eta_start is not None and self.eta_end is not None and self.eta_end > self.eta_start:
            raise ValueError("eta_end must not exceed eta_start")
        if self.convergence_tol <= 0 or self.gap_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True, eq=False)
class ProximalSolution:
    epsilon: float
    divergence: float
    weights_w: np.ndarray
    plan: TransportPlan
    potentials: DualPotentials
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    converged: bool = True
    eta: float = float("nan")

    @property
    def relative_gap(self):
        return self.gap / (1.0 + abs(self.primal_value))


def _kl(w, b):
    """KL(w || b) with 0 log 0 = 0; +inf if w charges a zero of b."""
    if np.any((b <= 0) & (w > 0)):
        return math.inf
    mask = w > 0
    return float(np.sum(xlogy(w[mask], w[mask]) - xlogy(w[mask], b[mask])))


def kl_divergence(a, b):
    return _kl(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))


def primal_objective(a, b, C, eps, w):
    """``T_C(a, w) + eps * KL(w || b)``; ``inf`` when w leaves the support of b."""
    a = _check_marginal(a, "a")
    b = _check_marginal(b, "b")
    w = _check_marginal(w, "w")
    C = _check_cost(C, (a.size, b.size))
    if w.size != b.size:
        raise ValueError("w and b must have the same length")
    kl = _kl(w, b)
    if math.isinf(kl):
        return math.inf
    return ot_value(a, w, C) + eps * kl


def ot_value(a, w, C):
    return solve_exact_ot(a, w, C)[0].value


def _log_partition(psi, b, eps):
    """``log sum_j b_j exp(-psi_j / eps)`` over the support of b."""
    mask = b > 0
    return float(logsumexp(-psi[mask] / eps, b=b[mask]))


def dual_objective(a, b, C, eps, phi, psi, tol=1e-9):
    """``<a, phi> - eps log sum_j b_j exp(-psi_j/eps)`` for a feasible pair."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    psi = np.asarray(psi, dtype=np.float64)
    slack = phi[:, None] + psi[None, :] - C
    i, j = np.unravel_index(np.argmax(slack), slack.shape)
    if slack[i, j] > tol:
        raise ValueError(f"infeasible potentials: phi[{i}] + psi[{j}] exceeds C[{i},{j}] by {slack[i, j]:.3e}")
    return float(np.dot(a, phi) - eps * _log_partition(psi, b, eps))


def recover_weights(psi, b, eps):
    """Gibbs reweighting ``w_j ∝ b_j exp(-psi_j / eps)`` of the target weights."""
    psi = np.asarray(psi, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    mask = b > 0
    if not np.any(mask):
        raise ValueError("b has no positive entries")
    logits = np.full(b.shape, -np.inf)
    logits[mask] = np.log(b[mask]) - psi[mask] / eps
    logits -= logsumexp(logits[mask])
    w = np.exp(logits)
    return w / w.sum()


def c_transform(psi, C):
    """``phi_i = min_j C_ij - psi_j``."""
    C = np.asarray(C, dtype=np.float64)
    return np.min(C - np.asarray(psi)[None, :], axis=1)


def cbar_transform(phi, C):
    """``psi_j = min_i C_ij - phi_i``."""
    C = np.asarray(C, dtype=np.float64)
    return np.min(C - np.asarray(phi)[:, None], axis=0)


def cost_scale(C):
    C = np.asarray(C, dtype=np.float64)
    med = float(np.median(C))
    if med > 0:
        return med
    top = float(C.max())
    return top if top > 0 else 1.0


# ---------------------------------------------------------------------------
# smoothed dual: H(g) = sum_i a_i softmin_j(C_ij - g_j) - eps log sum_j b_j e^{-g_j/eps}


def _lse(z, axis=None):
    # lean max-shifted log-sum-exp for the hot loops (finite inputs only)
    top = z.max(axis=axis, keepdims=True)
    out = np.log(np.exp(z - top).sum(axis=axis, keepdims=True)) + top
    return out.reshape(-1) if axis is not None else float(out.reshape(()))


def _row_logits(g, C, eta):
    return (g[None, :] - C) / eta


def _smoothed_state(g, a, b, C, eps, eta):
    z = _row_logits(g, C, eta)
    lse = _lse(z, axis=1)
    p = np.exp(z - lse[:, None])
    col = a @ p
    logw = np.log(b) - g / eps
    lz = _lse(logw)
    w = np.exp(logw - lz)
    value = -eta * np.dot(a, lse) - eps * lz
    return value, p, col, w


def _smoothed_value(g, a, b, C, eps, eta):
    lse = _lse(_row_logits(g, C, eta), axis=1)
    return -eta * np.dot(a, lse) - eps * _lse(np.log(b) - g / eps)


def _scaling_sweeps(g, a, b, C, eps, eta, budget, tol):
    """Log-domain semi-relaxed Sinkhorn: exact row marginal, KL column penalty."""
    kappa = eps / (eps + eta)
    log_a = np.log(a)
    log_b = np.log(b)
    # unbalanced fixed point has total column mass sum_j b_j e^{-g_j/eps} = 1
    g = g + eps * _lse(log_b - g / eps)
    history = []
    viol = math.inf
    it = 0
    for it in range(1, budget + 1):
        f = eta * log_a - eta * _lse(_row_logits(g, C, eta), axis=1)
        g = kappa * (eta * log_b - eta * _lse((f[:, None] - C) / eta, axis=0))
        _, _, col, w = _smoothed_state(g, a, b, C, eps, eta)
        viol = float(np.abs(col - w).sum())
        history.append(viol)
        if viol <= tol:
            break
        if it >= 4:
            # hand over to Newton once the observed contraction is too slow
            rate = (viol / history[-4]) ** (1 / 3) if history[-4] > 0 else 0.0
            if rate >= 1 or math.log(tol / viol) / math.log(rate) > 20:
                break
    return g, it, viol


# Newton iterations allowed without halving the marginal violation
NEWTON_STALL = 5


def _newton(g, a, b, C, eps, eta, budget, tol):
    """Damped Newton ascent on H with the last potential held fixed."""
    m = g.size
    value, p, col, w = _smoothed_state(g, a, b, C, eps, eta)
    grad = w - col
    viol = float(np.abs(grad).sum())
    best, stalled = viol, 0
    it = 0
    for it in range(1, budget + 1):
        if viol <= tol or m == 1:
            it -= 1
            break
        # at tiny eta rounding puts a floor under the violation
        if stalled >= NEWTON_STALL:
            break
        pa = p * a[:, None]
        hess = (np.diag(col) - p.T @ pa) / eta + (np.diag(w) - np.outer(w, w)) / eps
        hr = hess[:-1, :-1]
        gr = grad[:-1]
        try:
            step = np.linalg.solve(hr + 1e-14 * np.trace(hr) / m * np.eye(m - 1), gr)
        except np.linalg.LinAlgError:
            step = gr
        direction = np.append(step, 0.0)
        slope = float(np.dot(grad, direction))
        if not slope > 0:
            direction = grad - grad.mean()
            slope = float(np.dot(grad, direction))
        t = 1.0
        improved = False
        while t > 1e-12:
            trial = g + t * direction
            tv = _smoothed_value(trial, a, b, C, eps, eta)
            if tv >= value + 1e-4 * t * slope:
                improved = True
                break
            t *= 0.5
        if not improved:
            break
        moved = t * float(np.max(np.abs(direction)))
        g = trial
        value, p, col, w = _smoothed_state(g, a, b, C, eps, eta)
        grad = w - col
        viol = float(np.abs(grad).sum())
        if viol < 0.5 * best:
            best, stalled = viol, 0
        else:
            stalled += 1
        if moved <= 1e-15 * max(1.0, float(np.max(np.abs(g)))):
            break
    return g, it, viol


def _solve_stage(g, a, b, C, eps, eta, cfg):
    g, n_scale, viol = _scaling_sweeps(g, a, b, C, eps, eta, cfg.max_iterations, cfg.convergence_tol)
    n_newton = 0
    if viol > cfg.convergence_tol:
        g, n_newton, viol = _newton(g, a, b, C, eps, eta, min(cfg.max_iterations, 100), cfg.convergence_tol)
    return g, n_scale + n_newton, viol


# ---------------------------------------------------------------------------
# certification


@dataclass
class _Certificate:
    primal: float
    dual: float
    psi: np.ndarray
    phi: np.ndarray
    w: np.ndarray
    plan: TransportPlan


def _pair_from_psi(psi, C):
    """Feasible pair (psi^c, psi^cc); infinite entries of psi are ignored."""
    finite = np.isfinite(psi)
    phi = np.min(C[:, finite] - psi[finite][None, :], axis=1)
    psi = cbar_transform(phi, C)
    shift = psi[-1]
    return phi + shift, psi - shift


def _dual_of_psi(psi, a, b, C, eps):
    phi, psi = _pair_from_psi(psi, C)
    return float(np.dot(a, phi) - eps * _log_partition(psi, b, eps)), phi, psi


def _primal_at(phi, psi, a, b, C, eps):
    w = recover_weights(psi, b, eps)
    plan, ot_duals = solve_exact_ot(a, w, C)
    return plan.value + eps * _kl(w, b), w, plan, ot_duals


def _forest_potentials(plan, a, b, C, eps, threshold):
    """Exact optimal potential for a guessed optimal support.

    On each connected component of ``{plan > threshold}`` the potentials
    solve ``phi_i + psi_j = C_ij`` along a spanning tree; the free constant
    per component is then fixed by requiring the Gibbs weights of its
    columns to carry the component's row mass.
    """
    n, m = plan.shape
    rows, cols = np.nonzero(plan > threshold)
    order = np.argsort(-plan[rows, cols], kind="stable")
    rows, cols = rows[order], cols[order]
    parent = np.arange(n + m)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adj = [[] for _ in range(n + m)]
    for i, j in zip(rows, cols):
        ri, rj = find(i), find(n + j)
        if ri != rj:
            parent[ri] = rj
            adj[i].append(n + j)
            adj[n + j].append(i)
    pot = np.full(n + m, np.nan)
    psi = np.full(m, np.inf)
    for start in range(n, n + m):
        if not np.isnan(pot[start]) or not adj[start] or b[start - n] <= 0:
            continue
        pot[start] = 0.0
        comp = [start]
        stack = [start]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if np.isnan(pot[u]):
                    i, j = (u, v - n) if u < n else (v, u - n)
                    pot[u] = C[i, j] - pot[v]
                    comp.append(u)
                    stack.append(u)
        rmass = sum(a[v] for v in comp if v < n)
        cidx = np.array([v - n for v in comp if v >= n])
        cidx = cidx[b[cidx] > 0]
        if rmass <= 0 or cidx.size == 0:
            continue
        log_b = float(logsumexp(-pot[n + cidx] / eps, b=b[cidx]))
        psi[cidx] = pot[n + cidx] + eps * (log_b - math.log(rmass))
    return psi


def _certify(psi_supp, support, a, b, C, eps, smoothed_plan=None):
    """Certified primal/dual bounds from a smoothed potential on supp(b)."""
    m = b.size
    psi0 = np.full(m, np.inf)
    psi0[support] = psi_supp
    dual, phi, psi = _dual_of_psi(psi0, a, b, C, eps)
    primal, w, plan, ot_duals = _primal_at(phi, psi, a, b, C, eps)
    best = _Certificate(primal, dual, psi, phi, w, plan)

    candidates = [ot_duals.psi]
    # inverting the Gibbs relation at w
    psi_inv = np.full(m, np.inf)
    with np.errstate(divide="ignore"):
        # an underflowed w_j gives psi_j = +inf, i.e. the atom is dropped
        psi_inv[support] = -eps * (np.log(w[support]) - np.log(b[support]))
    candidates.append(psi_inv)
    top = float(plan.plan.max())
    for rel in (1e-12, 1e-9, 1e-6):
        candidates.append(_forest_potentials(plan.plan, a, b, C, eps, rel * top))
    if smoothed_plan is not None:
        # the smoothed plan often exposes the optimal support before w settles
        top = float(smoothed_plan.max())
        for rel in (1e-6, 1e-3):
            candidates.append(_forest_potentials(smoothed_plan, a, b, C, eps, rel * top))
    scored = []
    for cand in candidates:
        if not np.any(np.isfinite(cand) & support):
            continue
        scored.append(_dual_of_psi(cand, a, b, C, eps))
    if scored:
        dual2, phi2, psi2 = max(scored, key=lambda t: t[0])
        best.dual = max(best.dual, dual2)
        if dual2 > dual:
            primal2, w2, plan2, _ = _primal_at(phi2, psi2, a, b, C, eps)
            if primal2 < best.primal:
                best = _Certificate(primal2, best.dual, psi2, phi2, w2, plan2)
    return best


def _embed_plan(g, ar, br, Cr, eps, eta, rows, support):
    _, p, _, _ = _smoothed_state(g, ar, br, Cr, eps, eta)
    full = np.zeros((rows.size, support.size))
    full[np.ix_(rows, support)] = ar[:, None] * p
    return full


def _validate(a, b, C, eps):
    a = _check_marginal(a, "a")
    b = _check_marginal(b, "b")
    C = _check_cost(C, (a.size, b.size))
    if not (np.isfinite(eps) and eps > 0):
        raise ValueError(f"eps must be positive and finite, got {eps}")
    return a, b, C, float(eps)


def solve_proximal(a, b, C, eps, config: SolverConfig | None = None, init_psi=None,
                   quiet=False) -> ProximalSolution:
    """Proximal OT divergence with its optimal intermediate weights and certificate.

    ``init_psi`` warm-starts the target potential (e.g. from a nearby
    problem); the annealing then starts a few stages above ``eta_end``.
    ``quiet`` suppresses the non-convergence warning (for callers that retry).
    """
    cfg = SolverConfig() if config is None else config
    a, b, C, eps = _validate(a, b, C, eps)
    support = b > 0
    rows = a > 0
    Cr = C[rows][:, support]
    ar = a[rows] / a[rows].sum()
    br = b[support] / b[support].sum()
    scale = cost_scale(Cr)
    eta = cfg.eta_start if cfg.eta_start is not None else scale
    eta_end = cfg.eta_end if cfg.eta_end is not None else 1e-3 * scale
    eta_end = min(eta_end, eta)
    eta_floor = cfg.eta_floor * scale

    g = np.zeros(br.size)
    if init_psi is not None:
        init_psi = np.asarray(init_psi, dtype=np.float64)
        if init_psi.shape != b.shape or not np.all(np.isfinite(init_psi[support])):
            raise ValueError("init_psi must be finite with one entry per target point")
        g = init_psi[support] - init_psi[support][-1]
        # a few stages above eta_end: cheaper than Newton from afar at eta_end
        eta = max(eta_end / cfg.anneal_factor**4, eta_end) if cfg.anneal_factor < 1 else eta_end
        eta = min(eta, cfg.eta_start if cfg.eta_start is not None else scale)
    iterations = 0
    viol = math.inf
    while True:
        g, it, viol = _solve_stage(g, ar, br, Cr, eps, eta, cfg)
        iterations += it
        if eta <= eta_end * (1 + 1e-12):
            break
        eta = max(eta * cfg.anneal_factor, eta_end)

    cert = _certify(g, support, a, b, C, eps, _embed_plan(g, ar, br, Cr, eps, eta, rows, support))
    best, best_dual = cert, cert.dual
    if cfg.polish:
        stages_left = cfg.extra_stages
        while stages_left > 0:
            target = cfg.gap_tol * (1 + abs(best.primal))
            gap = best.primal - best_dual
            if gap <= target:
                break
            # the gap shrinks roughly linearly in eta: skip certificates for
            # the halvings it predicts are needed
            jumps = max(1, math.ceil(math.log(gap / target) / -math.log(cfg.anneal_factor)))
            jumps = min(jumps, stages_left)
            progressed = False
            for _ in range(jumps):
                if eta * cfg.anneal_factor < eta_floor:
                    break
                eta *= cfg.anneal_factor
                g, it, viol = _solve_stage(g, ar, br, Cr, eps, eta, cfg)
                iterations += it
                stages_left -= 1
                progressed = True
            if not progressed:
                break
            cert = _certify(g, support, a, b, C, eps, _embed_plan(g, ar, br, Cr, eps, eta, rows, support))
            best_dual = max(best_dual, cert.dual)
            if cert.primal < best.primal:
                best = cert

    gap = best.primal - best_dual
    converged = gap <= cfg.gap_tol * (1 + abs(best.primal))
    if not converged and not quiet:
        log.warning("proximal solve stopped with relative gap %.3e", gap / (1 + abs(best.primal)))
    return ProximalSolution(
        epsilon=eps,
        divergence=best.primal,
        weights_w=best.w,
        plan=best.plan,
        potentials=DualPotentials(best.phi, best.psi),
        primal_value=best.primal,
        dual_value=best_dual,
        gap=gap,
        iterations=iterations,
        converged=bool(converged),
        eta=eta,
    )


def divergence_curve(a, b, C, eps_list, config=None, workers=None):
    """``[(eps, divergence), ...]`` over an ascending grid of eps values."""
    eps_list = [float(e) for e in eps_list]
    if any(e <= 0 for e in eps_list):
        raise ValueError("eps values must be positive")
    if any(e2 <= e1 for e1, e2 in zip(eps_list, eps_list[1:])):
        raise ValueError("eps values must be strictly ascending")
    sols = solve_curve(a, b, C, eps_list, config, workers)
    return [(e, s.divergence) for e, s in zip(eps_list, sols)]


def solve_curve(a, b, C, eps_list, config=None, workers=None):
    workers = max_workers() if workers is None else workers
    if workers <= 1 or len(eps_list) <= 1:
        return [solve_proximal(a, b, C, e, config) for e in eps_list]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda e: solve_proximal(a, b, C, e, config), eps_list))


def max_workers():
    env = os.environ.get("PROXOT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# brute-force oracle for at most three target points


def _dual_vertices(C):
    """Candidate column potentials (last entry 0) covering every vertex of the
    piecewise-linear map psi -> sum_i a_i min_j (C_ij - psi_j)."""
    n, m = C.shape
    if m == 1:
        return np.zeros((1, 1))
    if m == 2:
        s = C[:, 0] - C[:, 1]
        return np.column_stack([s, np.zeros(n)])
    d01 = C[:, 0] - C[:, 1]
    d02 = C[:, 0] - C[:, 2]
    d12 = C[:, 1] - C[:, 2]
    s1, t1 = np.meshgrid(d02, d12, indexing="ij")
    s2, k2 = np.meshgrid(d02, d01, indexing="ij")
    t3, k3 = np.meshgrid(d12, d01, indexing="ij")
    s = np.concatenate([s1.ravel(), s2.ravel(), (k3 + t3).ravel()])
    t = np.concatenate([t1.ravel(), (s2 - k2).ravel(), t3.ravel()])
    return np.column_stack([s, t, np.zeros_like(s)])


class _SmallOT:
    """T_C(a, w) for many w at once, via the dual vertex enumeration."""

    def __init__(self, a, C):
        self.psi = _dual_vertices(C)
        self.h = np.array([np.dot(a, np.min(C - psi[None, :], axis=1)) for psi in self.psi])

    def __call__(self, w):
        w = np.atleast_2d(w)
        return np.max(self.h[None, :] + w @ self.psi.T, axis=1)


def _golden(f, lo, hi, iters=100):
    """Vectorized golden-section minimization of a convex f on [lo, hi]."""
    r = (math.sqrt(5) - 1) / 2
    x1 = hi - r * (hi - lo)
    x2 = lo + r * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        left = f1 <= f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        nx1 = hi - r * (hi - lo)
        nx2 = lo + r * (hi - lo)
        x2n = np.where(left, x1, nx2)
        x1n = np.where(left, nx1, x2)
        f2n_keep = np.where(left, f1, f2)
        x1, x2 = x1n, x2n
        fx = f(np.where(left, x1, x2))
        f1 = np.where(left, fx, f2n_keep)
        f2 = np.where(left, f2n_keep, fx)
    x = (lo + hi) / 2
    return x, f(x)


def brute_force_proximal(a, b, C, eps, grid_n=10_000):
    """Grid-search oracle for the primal program, M <= 3 target points.

    Scans the simplex at resolution ``1/grid_n`` and refines around the best
    cell by golden-section search (the objective is convex in w). For three
    points the scan runs over the first coordinate; the second is minimized
    exactly by golden section for every grid value. The inner transport cost
    comes from dual vertex enumeration, independent of the network simplex.
    """
    a, b, C, eps = _validate(a, b, C, eps)
    keep = b > 0
    if keep.sum() > 3:
        raise ValueError("brute force supports at most 3 target points")
    bs, Cs = b[keep], C[:, keep]
    m = bs.size
    ot = _SmallOT(a, Cs)

    def objective(W):
        W = np.clip(W, 0.0, None)
        kl = np.sum(xlogy(W, W) - xlogy(W, bs[None, :]), axis=1)
        return ot(W) + eps * kl

    def lift(w_supp):
        w = np.zeros(b.size)
        w[keep] = w_supp
        return w

    if m == 1:
        w = np.ones(1)
        return float(objective(w[None, :])[0]), lift(w)

    step = 1.0 / grid_n
    if m == 2:
        t = np.linspace(0.0, 1.0, grid_n + 1)
        vals = objective(np.column_stack([t, 1 - t]))
        k = int(np.argmin(vals))
        lo, hi = max(t[k] - step, 0.0), min(t[k] + step, 1.0)
        x, fx = _golden(lambda s: objective(np.column_stack([s, 1 - s])), np.array([lo]), np.array([hi]))
        cands = [(float(vals[k]), t[k]), (float(fx[0]), float(x[0]))]
        val, t0 = min(cands)
        return val, lift(np.array([t0, 1 - t0]))

    def inner(t):
        t = np.atleast_1d(t)
        rest = 1.0 - t

        def f(s):
            return objective(np.column_stack([t, s * rest, (1 - s) * rest]))

        s, fs = _golden(f, np.zeros_like(t), np.ones_like(t), iters=60)
        # the golden bracket never evaluates the endpoints exactly
        f0, f1 = f(np.zeros_like(t)), f(np.ones_like(t))
        best = np.minimum(fs, np.minimum(f0, f1))
        s = np.where(best == f0, 0.0, np.where(best == f1, 1.0, s))
        return best, s

    t = np.linspace(0.0, 1.0, grid_n + 1)
    vals, svals = inner(t)
    k = int(np.argmin(vals))
    lo, hi = max(t[k] - step, 0.0), min(t[k] + step, 1.0)
    x, _ = _golden(lambda u: inner(u)[0], np.array([lo]), np.array([hi]), iters=80)
    fx, sx = inner(x)
    if fx[0] < vals[k]:
        t0, s0, val = float(x[0]), float(sx[0]), float(fx[0])
    else:
        t0, s0, val = float(t[k]), float(svals[k]), float(vals[k])
    return val, lift(np.array([t0, s0 * (1 - t0), (1 - s0) * (1 - t0)]))


def with_overrides(config, **kwargs):
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    return replace(config, **kwargs)
