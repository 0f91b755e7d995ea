"""Annealed Langevin Monte Carlo sampling for multimodal targets.

Subpackages by concern: targets (potentials and oracles), schedule
(annealing pairs, time grids, step coefficients), samplers (annealed and
plain chains, exact start sampling), metrics (divergence and action
estimators), harness (the radius-scaling experiment).
"""

from .harness import (
    ExperimentConfig,
    ExperimentRecord,
    FitResult,
    iterations_to_threshold,
    loglog_fit,
    run_sweep,
)
from .metrics import (
    ActionReport,
    SampleSet,
    gaussian_w2,
    heat_curve_action,
    knn_kl,
    mode_coverage,
    mog_action_bound,
)
from .samplers import (
    ChainResult,
    ChainState,
    almc_step,
    gd_minimize,
    rng_stream,
    run_almc,
    run_almc_batch,
    run_lmc,
    run_lmc_batch,
    sample_pi0,
    sample_pi0_batch,
)
from .schedule import (
    AnnealingSchedule,
    StepCoefficients,
    ThetaGrid,
    coefficients_for_grid,
    default_lambda0,
    grid_from_quadratic_steps,
    lambda_integral,
    plan_parameters,
    quadratic_step_sizes,
    step_coefficients,
)
from .targets import GaussianMixtureTarget, QuadraticTarget, TargetOracle, ring_mixture

__version__ = "0.1.0"

__all__ = [
    "ActionReport",
    "AnnealingSchedule",
    "ChainResult",
    "ChainState",
    "ExperimentConfig",
    "ExperimentRecord",
    "FitResult",
    "GaussianMixtureTarget",
    "QuadraticTarget",
    "SampleSet",
    "StepCoefficients",
    "TargetOracle",
    "ThetaGrid",
    "almc_step",
    "coefficients_for_grid",
    "default_lambda0",
    "gaussian_w2",
    "gd_minimize",
    "grid_from_quadratic_steps",
    "heat_curve_action",
    "iterations_to_threshold",
    "knn_kl",
    "lambda_integral",
    "loglog_fit",
    "mode_coverage",
    "mog_action_bound",
    "plan_parameters",
    "quadratic_step_sizes",
    "ring_mixture",
    "rng_stream",
    "run_almc",
    "run_almc_batch",
    "run_lmc",
    "run_lmc_batch",
    "run_sweep",
    "sample_pi0",
    "sample_pi0_batch",
    "step_coefficients",
]
