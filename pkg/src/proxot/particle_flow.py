"""Deterministic particle transport driven by the proximal discriminator.

Each Euler step solves the discrete proximal problem between the current
particle cloud (uniform weights) and the target samples, extends the optimal
target potential to all of space, and moves every particle against the
gradient of that extension.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .discriminator import Discriminator
from .measures import CostSpec, DiscreteMeasure, build_cost
from .prox_solver import ProximalSolution, SolverConfig, solve_proximal

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowConfig:
    epsilon: float = 0.5
    step_dt: float = 0.05
    num_steps: int = 100
    p: float = 2.0
    snapshot_every: int = 10
    seed: int = 0
    solver: SolverConfig = field(default_factory=lambda: SolverConfig(gap_tol=1e-7, extra_stages=12))

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.step_dt <= 1:
            raise ValueError("step_dt must lie in (0, 1]")
        if not self.p > 1:
            raise ValueError("the flow needs a differentiable cost, p > 1")
        if self.num_steps < 0 or self.snapshot_every < 1:
            raise ValueError("num_steps must be >= 0 and snapshot_every >= 1")


@dataclass(frozen=True)
class FlowRecord:
    step: int
    divergence: float
    gap: float


@dataclass(frozen=True, eq=False)
class FlowState:
    particles: np.ndarray
    step_index: int = 0
    last_solution: ProximalSolution | None = None
    history: tuple = ()
    snapshots: tuple = ()
    flagged: bool = False

    @property
    def divergences(self):
        return np.array([r.divergence for r in self.history])

    def as_measure(self):
        return DiscreteMeasure(self.particles)


def initial_state(source: DiscreteMeasure) -> FlowState:
    pts = np.array(source.points, dtype=np.float64)
    return FlowState(particles=pts, snapshots=((0, pts.copy()),))


def flow_step(state: FlowState, targets: DiscreteMeasure, cfg: FlowConfig) -> FlowState:
    """One explicit Euler step ``Y <- Y - dt * grad phi(Y)``."""
    particles = state.particles
    if particles.shape[1] != targets.dim:
        raise ValueError(f"particles are {particles.shape[1]}-D, targets {targets.dim}-D")
    cost = CostSpec.power(cfg.p)
    current = DiscreteMeasure(particles)
    C = build_cost(current, targets, cost)
    sol = solve_proximal(current.weights, targets.weights, C, cfg.epsilon, cfg.solver)
    if not sol.converged:
        log.warning("step %d aborted: proximal solve did not converge", state.step_index)
        return replace(state, flagged=True)
    disc = Discriminator(targets.points, sol.potentials.psi, cost)
    moved = particles - cfg.step_dt * disc.gradient(particles)
    step = state.step_index + 1
    if state.history and sol.divergence > state.history[-1].divergence + 1e-12:
        log.warning("certified divergence increased at step %d: %.6g -> %.6g",
                    step, state.history[-1].divergence, sol.divergence)
    history = state.history + (FlowRecord(state.step_index, sol.divergence, sol.gap),)
    snapshots = state.snapshots
    if step % cfg.snapshot_every == 0:
        snapshots = snapshots + ((step, moved.copy()),)
    return FlowState(moved, step, sol, history, snapshots, False)


def run_flow(source: DiscreteMeasure, targets: DiscreteMeasure, cfg: FlowConfig) -> FlowState:
    """Iterate :func:`flow_step`; stops early if a step gets flagged.

    ``history[k]`` holds the certified divergence of the particles *before*
    step k moved them. One extra solve at the end records the final cloud.
    """
    state = initial_state(source)
    for _ in range(cfg.num_steps):
        state = flow_step(state, targets, cfg)
        if state.flagged:
            return state
    final = DiscreteMeasure(state.particles)
    C = build_cost(final, targets, CostSpec.power(cfg.p))
    sol = solve_proximal(final.weights, targets.weights, C, cfg.epsilon, cfg.solver)
    record = FlowRecord(state.step_index, sol.divergence, sol.gap)
    snapshots = state.snapshots
    if not snapshots or snapshots[-1][0] != state.step_index:
        snapshots = snapshots + ((state.step_index, state.particles.copy()),)
    return replace(state, last_solution=sol, history=state.history + (record,), snapshots=snapshots)


def energy_distance(A: DiscreteMeasure, B: DiscreteMeasure) -> float:
    """``2 E|X - Y| - E|X - X'| - E|Y - Y'|`` under the measures' weights."""
    if A.dim != B.dim:
        raise ValueError("measures live in different dimensions")
    dist = CostSpec.power(1.0).pairwise
    ab = A.weights @ dist(A.points, B.points) @ B.weights
    aa = A.weights @ dist(A.points, A.points) @ A.weights
    bb = B.weights @ dist(B.points, B.points) @ B.weights
    return max(float(2 * ab - aa - bb), 0.0)


def sample_gaussian(mean, std, n, seed):
    """``n`` samples from N(mean, diag(std^2)) using the Philox generator."""
    rng = np.random.Generator(np.random.Philox(seed))
    mean = np.atleast_1d(np.asarray(mean, dtype=np.float64))
    std = np.atleast_1d(np.asarray(std, dtype=np.float64))
    return mean + std * rng.standard_normal((n, mean.size))
