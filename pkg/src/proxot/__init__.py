"""Proximal optimal transport divergences between discrete measures."""

from .discriminator import Discriminator
from .exact_ot import DualPotentials, TransportPlan, ot_cost, solve_exact_ot, wasserstein_p
from .gaussian import (
    Gaussian1D,
    GaussianDiag,
    gaussian_interpolant_curve,
    proximal_gaussian_1d,
    proximal_gaussian_diag,
)
from .measures import (
    CostMatrix,
    CostSpec,
    DiscreteMeasure,
    IsometryMap,
    build_cost,
    product_measure,
    pushforward,
    uniform,
)
from .particle_flow import FlowConfig, FlowState, energy_distance, flow_step, run_flow, sample_gaussian
from .prox_solver import (
    ProximalSolution,
    SolverConfig,
    brute_force_proximal,
    c_transform,
    cbar_transform,
    divergence_curve,
    dual_objective,
    kl_divergence,
    primal_objective,
    recover_weights,
    solve_curve,
    solve_proximal,
)

__version__ = "0.1.0"
