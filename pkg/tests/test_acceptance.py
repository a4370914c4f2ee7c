"""Acceptance criteria. Each test prints one PASS/FAIL line in the terminal summary.

These tests run after the rest of the suite, so criterion 8 covers every
solver call made by the whole session.
"""

import time

import numpy as np
import pytest

from conftest import AUDIT, certificate_problems
from oracles import gaussian_grid_search
from proxot import io
from proxot.discriminator import Discriminator
from proxot.exact_ot import ot_cost
from proxot.gaussian import Gaussian1D, proximal_gaussian_1d
from proxot.measures import CostSpec, DiscreteMeasure, IsometryMap, build_cost, product_measure, pushforward
from proxot.particle_flow import FlowConfig, energy_distance, run_flow
from proxot.prox_solver import brute_force_proximal, kl_divergence, solve_proximal


def gen(seed):
    return np.random.Generator(np.random.Philox(seed))


def divergence(P, Q, eps, p=2.0):
    C = np.asarray(build_cost(P, Q, CostSpec.power(p)))
    return solve_proximal(P.weights, Q.weights, C, eps)


def shared_support_instance(g, n=None, dim=2):
    n = n or int(g.integers(2, 9))
    x = g.standard_normal((n, dim))
    a = g.dirichlet(np.ones(n)) * 0.9 + 0.1 / n
    b = g.dirichlet(np.ones(n)) * 0.9 + 0.1 / n
    return DiscreteMeasure(x, a / a.sum()), DiscreteMeasure(x, b / b.sum())


@pytest.mark.criterion(1, "Gaussian closed form")
def test_gaussian_closed_form(detail):
    P, Q = Gaussian1D(0.0, 1.0), Gaussian1D(2.0, 1.0)
    value, R = proximal_gaussian_1d(P, Q, 2.0)
    times = []
    for _ in range(1000):
        t0 = time.perf_counter()
        proximal_gaussian_1d(P, Q, 2.0)
        times.append(time.perf_counter() - t0)
    ms = 1e3 * float(np.median(times))
    ref, m, s = gaussian_grid_search(P, Q, 2.0, center=(1.0, 1.0))
    detail(f"D={value!r} R=N({R.mean!r},{R.std!r}^2) grid=({ref:.8f},{m:.4f},{s:.4f}) median {ms:.4f} ms")
    assert abs(value - 2.0) <= 1e-9
    assert abs(R.mean - 1.0) <= 1e-9 and abs(R.std - 1.0) <= 1e-9
    assert abs(m - R.mean) <= 1e-4 and abs(s - R.std) <= 1e-4 and abs(ref - value) <= 1e-6
    assert ms < 1.0


@pytest.mark.criterion(2, "discrete vs analytic Gaussian")
def test_discrete_analytic_agreement(fixtures_dir, detail):
    P = io.read_samples(fixtures_dir / "gaussian_grid_p.csv")
    Q = io.read_samples(fixtures_dir / "gaussian_grid_q.csv")
    t0 = time.perf_counter()
    sol = divergence(P, Q, 2.0)
    secs = time.perf_counter() - t0
    rel = abs(sol.divergence - 2.0) / 2.0
    detail(f"D={sol.divergence:.6f} rel.err {rel:.2e} gap {sol.gap:.2e} in {secs:.2f} s")
    assert rel <= 0.03
    assert sol.gap <= 1e-4 * sol.divergence
    assert secs < 30


@pytest.mark.criterion(3, "brute-force oracle equivalence")
def test_brute_force_equivalence(detail):
    g = gen(3003)
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(50):
        n, m = int(g.integers(1, 6)), int(g.integers(2, 4))
        a = g.dirichlet(np.ones(n))
        b = g.dirichlet(np.ones(m))
        C = g.random((n, m)) * 3
        eps = float(np.exp(g.uniform(np.log(0.05), np.log(10))))
        sol = solve_proximal(a, b, C, eps)
        ref, _ = brute_force_proximal(a, b, C, eps, grid_n=10_000)
        worst = max(worst, abs(sol.divergence - ref))
    secs = time.perf_counter() - t0
    detail(f"50 instances, max |D - oracle| = {worst:.2e} in {secs:.1f} s")
    assert worst <= 1e-4
    assert secs < 60


@pytest.mark.criterion(4, "interpolation limits and monotonicity")
def test_interpolation_limits(detail):
    worst_hi = worst_lo = 0.0
    mono = True
    for seed in range(3):
        P, Q = shared_support_instance(gen(4000 + seed), n=6)
        C = np.asarray(build_cost(P, Q))
        med = float(np.median(C))
        T = ot_cost(P.weights, Q.weights, C)
        kl = kl_divergence(P.weights, Q.weights)
        hi = solve_proximal(P.weights, Q.weights, C, 1e3 * med)
        lo_eps = 1e-3 * med
        lo = solve_proximal(P.weights, Q.weights, C, lo_eps)
        worst_hi = max(worst_hi, abs(hi.divergence - T) / T)
        worst_lo = max(worst_lo, abs(lo.divergence / lo_eps - kl) / kl)
        grid = np.geomspace(1e-3 * med, 1e3 * med, 20)
        d = np.array([solve_proximal(P.weights, Q.weights, C, e).divergence for e in grid])
        mono &= bool(np.all(np.diff(d) >= -1e-6) and np.all(np.diff(d / grid) <= 1e-6))
    detail(f"large eps rel.err {worst_hi:.2e}, small eps D/eps rel.err {worst_lo:.2e}, monotone {mono}")
    assert worst_hi <= 0.01 and worst_lo <= 0.01 and mono


@pytest.mark.criterion(5, "upper bound min(T_C, eps KL)")
def test_upper_bound(detail):
    g = gen(5005)
    worst = -np.inf
    for _ in range(100):
        P, Q = shared_support_instance(g)
        C = np.asarray(build_cost(P, Q))
        eps = float(np.exp(g.uniform(np.log(1e-2), np.log(1e2))))
        sol = solve_proximal(P.weights, Q.weights, C, eps)
        bound = min(ot_cost(P.weights, Q.weights, C), eps * kl_divergence(P.weights, Q.weights))
        worst = max(worst, sol.divergence - bound)
    detail(f"100 instances, max D - bound = {worst:.2e}")
    assert worst <= 1e-6


@pytest.mark.criterion(6, "additivity over products")
def test_additivity(detail):
    g = gen(6006)
    worst = 0.0
    for _ in range(20):
        parts = []
        for _ in range(4):
            k = int(g.integers(1, 5))
            parts.append(DiscreteMeasure.from_unnormalized(g.standard_normal((k, 1)), g.random(k) + 0.1))
        P1, Q1, P2, Q2 = parts
        eps = float(np.exp(g.uniform(np.log(0.1), np.log(10))))
        d1 = divergence(P1, Q1, eps).divergence
        d2 = divergence(P2, Q2, eps).divergence
        d12 = divergence(product_measure(P1, P2), product_measure(Q1, Q2), eps).divergence
        worst = max(worst, abs(d12 - d1 - d2) / (1 + d1 + d2))
    detail(f"20 instances, max |D12 - D1 - D2| / (1 + D1 + D2) = {worst:.2e}")
    assert worst <= 1e-3


def contract(P, f):
    return DiscreteMeasure(f(P.points), P.weights)


@pytest.mark.criterion(7, "isometry invariance and data processing")
def test_isometry_and_dpi(detail):
    g = gen(7007)
    worst_iso = 0.0
    worst_dpi = -np.inf
    for _ in range(20):
        dim = int(g.integers(2, 4))
        n, m = int(g.integers(2, 7)), int(g.integers(2, 7))
        P = DiscreteMeasure.from_unnormalized(g.standard_normal((n, dim)), g.random(n) + 0.1)
        Q = DiscreteMeasure.from_unnormalized(g.standard_normal((m, dim)) + 0.5, g.random(m) + 0.1)
        eps = float(np.exp(g.uniform(np.log(0.1), np.log(10))))
        base = divergence(P, Q, eps).divergence
        T = IsometryMap.random(dim, g)
        moved = divergence(pushforward(P, T), pushforward(Q, T), eps).divergence
        worst_iso = max(worst_iso, abs(moved - base))
        A = g.standard_normal((dim, dim))
        A /= np.linalg.norm(A, 2) * g.uniform(1.0, 3.0)
        shift = g.standard_normal(dim)
        maps = [
            lambda x: x[:, :1],                       # coordinate projection
            lambda x: x[:, ::2],
            lambda x: x @ A.T + shift,                # linear contraction
            lambda x: np.tanh(x),                     # 1-Lipschitz, coordinatewise
            lambda x: 0.5 * x,
        ]
        for f in maps:
            d = divergence(contract(P, f), contract(Q, f), eps).divergence
            worst_dpi = max(worst_dpi, d - base)
    detail(f"max |D(TP||TQ) - D(P||Q)| = {worst_iso:.2e}, max DPI excess = {worst_dpi:.2e}")
    assert worst_iso <= 1e-6
    assert worst_dpi <= 1e-6


@pytest.mark.criterion(8, "duality certificate on every solve")
def test_certificate_audit(detail):
    # a fresh batch of awkward instances on top of everything the suite solved
    g = gen(8008)
    own = []
    for _ in range(60):
        n, m = int(g.integers(1, 12)), int(g.integers(1, 12))
        a = g.dirichlet(np.ones(n))
        b = g.dirichlet(np.ones(m))
        if m > 2:
            b[0] = 0.0
            b /= b.sum()
        C = g.random((n, m)) * float(g.choice([1e-3, 1.0, 1e3]))
        eps = float(np.exp(g.uniform(np.log(1e-3), np.log(1e3))))
        own.append((b, solve_proximal(a, b, C, eps)))
    problems = [p for b, sol in own for p in certificate_problems(b, sol)]
    total = AUDIT["solves"] + len(own)
    bad = len(AUDIT["violations"]) + len(problems)
    detail(f"{total} solves audited, {bad} violations")
    assert bad == 0


def off_tie_probes(d, g, n, h, spread):
    out = []
    while len(out) < n:
        x = d.target_points.mean(axis=0) + spread * g.standard_normal((4 * n, d.dim))
        s = np.sort(d._scores(x), axis=1)
        grad_scale = np.max(np.linalg.norm(d.gradient(x), axis=1)) + 1
        out.extend(x[s[:, 1] - s[:, 0] > 10 * h * grad_scale])
    return np.array(out[:n])


def fd_error(d, x, h):
    fd = np.empty_like(x)
    for k in range(d.dim):
        e = np.zeros(d.dim)
        e[k] = h
        fd[:, k] = (d.evaluate(x + e) - d.evaluate(x - e)) / (2 * h)
    return float(np.max(np.abs(d.gradient(x) - fd)))


@pytest.mark.criterion(9, "discriminator gradient vs finite differences")
def test_gradient_check(fixtures_dir, detail):
    g = gen(9009)
    h = 1e-5
    discs = []
    src = io.read_samples(fixtures_dir / "flow_source.csv")
    tgt = io.read_samples(fixtures_dir / "flow_target.csv")
    discs.append(Discriminator(tgt.points, divergence(src, tgt, 0.5).potentials.psi))
    for dim, p in ((2, 2.0), (3, 3.0), (2, 1.5)):
        P = DiscreteMeasure(g.standard_normal((30, dim)))
        Q = DiscreteMeasure(g.standard_normal((25, dim)) + 1)
        sol = divergence(P, Q, 0.7, p)
        discs.append(Discriminator(Q.points, sol.potentials.psi, CostSpec.power(p)))
    errs = [fd_error(d, off_tie_probes(d, g, 1000, h, 2.0), h) for d in discs]
    detail(f"{len(discs)} fixtures x 1000 probes, max error {max(errs):.2e}")
    assert max(errs) <= 1e-5


@pytest.mark.criterion(10, "particle flow on the frozen 1D fixture")
def test_particle_flow(fixtures_dir, detail):
    src = io.read_samples(fixtures_dir / "flow_source.csv")
    tgt = io.read_samples(fixtures_dir / "flow_target.csv")
    cfg = FlowConfig(epsilon=0.5, step_dt=0.05, num_steps=200, p=2.0)
    t0 = time.perf_counter()
    state = run_flow(src, tgt, cfg)
    secs = time.perf_counter() - t0
    e0, e1 = energy_distance(src, tgt), energy_distance(state.as_measure(), tgt)
    d = state.divergences
    rises = int(np.sum(np.diff(d[5:]) > 1e-4))
    detail(f"energy {e1:.4g}/{e0:.4g} = {e1 / e0:.2%}, divergence {d[-1]:.4g}/{d[5]:.4g} = "
           f"{d[-1] / d[5]:.2%}, {rises} rises after step 5, {secs:.0f} s")
    assert not state.flagged and state.step_index == 200
    assert e1 <= 0.1 * e0
    assert d[-1] < 0.2 * d[5]
    assert rises == 0
    assert secs < 300
