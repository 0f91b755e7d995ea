"""Annealed and plain Langevin chains plus the exact start-distribution sampler.

One annealed step toward the interpolation at progress theta_l is

    x_l = lam0 * x_{l-1} - H * grad V(x_{l-1}) + lam1 * xi_l,   xi_l ~ N(0, I)

with coefficients from :mod:`almc.schedule`.  Noise is always drawn one step
at a time with coordinates in index order, so two samplers sharing a
generator see the same variates and can be compared trajectory by
trajectory.

The start of the anneal has potential V0 = eta0 * V + lambda0/2 ||x||^2,
which is (lambda0 - eta0*beta)-strongly convex when lambda0 exceeds
eta0*beta for a two-sided smoothness bound beta of V.  It is sampled exactly
by rejection under the quadratic upper envelope anchored at an approximate
minimizer of V0 found by gradient descent.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .schedule import AnnealingSchedule, StepCoefficients, ThetaGrid, coefficients_for_grid
from .targets import TargetOracle


class NonFiniteGradientError(RuntimeError):
    """A potential gradient evaluated to NaN or infinity."""

    def __init__(self, position: np.ndarray, step_index: int | None = None):
        self.position = np.asarray(position)
        self.step_index = step_index
        where = f" at step {step_index}" if step_index is not None else ""
        super().__init__(f"non-finite gradient{where} at position {self.position!r}")


class EnvelopeViolationError(RuntimeError):
    """A rejection-sampling acceptance probability exceeded 1.

    The quadratic envelope fails to dominate the start density; the supplied
    smoothness bound does not actually bound the potential's curvature from
    below.
    """


class RejectionCapError(RuntimeError):
    """Rejection sampling exceeded its trial cap without accepting."""


class ConvergenceError(RuntimeError):
    """Gradient descent hit its iteration cap before reaching tolerance."""


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent, reproducible generator for (seed, stream).

    Streams with distinct indices are statistically independent; identical
    (seed, stream) pairs reproduce identical output bit for bit.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


@dataclass(frozen=True)
class ChainState:
    """Position of one chain plus step and oracle-call accounting."""

    position: np.ndarray
    step_index: int = 0
    oracle_calls: int = 0

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))


@dataclass(frozen=True)
class ChainResult:
    """Final state of a run, with the visited positions when traced."""

    state: ChainState
    trajectory: np.ndarray | None = None

    @property
    def position(self) -> np.ndarray:
        return self.state.position


def almc_step(
    state: ChainState,
    coeffs: StepCoefficients,
    target: TargetOracle,
    rng: np.random.Generator,
) -> ChainState:
    """Advance one chain by a single exponential-integrator step.

    Draws exactly d standard Gaussian variates from ``rng`` and counts one
    gradient-oracle call.
    """
    grad = target.grad_potential(state.position)
    if not np.all(np.isfinite(grad)):
        raise NonFiniteGradientError(state.position)
    noise = rng.standard_normal(state.position.shape[0])
    position = (
        coeffs.lam0 * state.position - coeffs.drift_weight * grad + coeffs.noise_scale * noise
    )
    return replace(
        state,
        position=position,
        step_index=state.step_index + 1,
        oracle_calls=state.oracle_calls + 1,
    )


def run_almc(
    target: TargetOracle,
    schedule: AnnealingSchedule,
    grid: ThetaGrid,
    rng: np.random.Generator,
    init: np.ndarray,
    trace: bool = False,
    coefficients: list[StepCoefficients] | None = None,
) -> ChainResult:
    """Run one annealed chain across every grid interval.

    ``init`` should be a draw from the start of the anneal (see
    :func:`sample_pi0`).  Makes exactly ``grid.num_steps`` gradient calls.
    Precomputed ``coefficients`` may be supplied to amortize the integrals
    across chains.
    """
    if coefficients is None:
        coefficients = coefficients_for_grid(schedule, grid)
    if len(coefficients) != grid.num_steps:
        raise ValueError("coefficient count does not match the grid")
    state = ChainState(position=init)
    path = [np.array(state.position)] if trace else None
    for coeffs in coefficients:
        try:
            state = almc_step(state, coeffs, target, rng)
        except NonFiniteGradientError as err:
            raise NonFiniteGradientError(err.position, step_index=state.step_index + 1) from None
        if trace:
            path.append(np.array(state.position))
    trajectory = np.stack(path) if trace else None
    return ChainResult(state=state, trajectory=trajectory)


def run_almc_batch(
    target: TargetOracle,
    schedule: AnnealingSchedule,
    grid: ThetaGrid,
    rng: np.random.Generator,
    inits: np.ndarray,
    coefficients: list[StepCoefficients] | None = None,
) -> np.ndarray:
    """Run many chains in lock step; returns final positions, shape (n, d).

    Noise for each step is one (n, d) standard-normal draw, so the batch is
    reproducible from (seed, stream) but not variate-compatible with n
    single-chain runs.
    """
    if coefficients is None:
        coefficients = coefficients_for_grid(schedule, grid)
    positions = np.array(inits, dtype=float)
    if positions.ndim != 2:
        raise ValueError("inits must have shape (n_chains, dim)")
    for step, coeffs in enumerate(coefficients, start=1):
        grads = target.grad_potential(positions)
        if not np.all(np.isfinite(grads)):
            bad = positions[~np.all(np.isfinite(grads), axis=1)][0]
            raise NonFiniteGradientError(bad, step_index=step)
        noise = rng.standard_normal(positions.shape)
        positions = coeffs.lam0 * positions - coeffs.drift_weight * grads + coeffs.noise_scale * noise
    return positions


def run_lmc(
    target: TargetOracle,
    h: float,
    n_steps: int,
    rng: np.random.Generator,
    init: np.ndarray,
    trace: bool = False,
) -> ChainResult:
    """Plain Langevin chain x <- x - h grad V(x) + sqrt(2h) xi."""
    if h <= 0:
        raise ValueError("step size must be positive")
    sqrt_2h = np.sqrt(2.0 * h)
    state = ChainState(position=init)
    path = [np.array(state.position)] if trace else None
    for step in range(1, n_steps + 1):
        grad = target.grad_potential(state.position)
        if not np.all(np.isfinite(grad)):
            raise NonFiniteGradientError(state.position, step_index=step)
        noise = rng.standard_normal(state.position.shape[0])
        state = replace(
            state,
            position=state.position - h * grad + sqrt_2h * noise,
            step_index=state.step_index + 1,
            oracle_calls=state.oracle_calls + 1,
        )
        if trace:
            path.append(np.array(state.position))
    trajectory = np.stack(path) if trace else None
    return ChainResult(state=state, trajectory=trajectory)


def run_lmc_batch(
    target: TargetOracle,
    h: float,
    n_steps: int,
    rng: np.random.Generator,
    inits: np.ndarray,
) -> np.ndarray:
    """Plain Langevin chains in lock step; returns final positions (n, d)."""
    if h <= 0:
        raise ValueError("step size must be positive")
    sqrt_2h = np.sqrt(2.0 * h)
    positions = np.array(inits, dtype=float)
    for step in range(1, n_steps + 1):
        grads = target.grad_potential(positions)
        if not np.all(np.isfinite(grads)):
            bad = positions[~np.all(np.isfinite(grads), axis=1)][0]
            raise NonFiniteGradientError(bad, step_index=step)
        positions = positions - h * grads + sqrt_2h * rng.standard_normal(positions.shape)
    return positions


def gd_minimize(
    target: TargetOracle,
    eta0: float,
    lambda0: float,
    tol: float | None = None,
    max_iters: int = 10_000,
) -> np.ndarray:
    """Approximate minimizer of V0 = eta0 * V + lambda0/2 ||x||^2.

    Gradient descent from the origin with step 1/(lambda0 + eta0*beta).
    Stops once ||grad V0|| <= (lambda0 - eta0*beta) * tol, which by strong
    convexity puts the iterate within tol of the exact minimizer.  The
    default tol is 1/sqrt(eta0 * beta).
    """
    beta = target.beta_smooth
    if lambda0 <= eta0 * beta:
        raise ValueError(
            f"lambda0 = {lambda0} must exceed eta0 * beta_smooth = {eta0 * beta} "
            "for the start potential to be strongly convex"
        )
    if tol is None:
        tol = 1.0 / np.sqrt(eta0 * beta) if eta0 > 0 else 1.0
    alpha = lambda0 - eta0 * beta
    step = 1.0 / (lambda0 + eta0 * beta)
    x = np.zeros(target.dim)
    for _ in range(max_iters):
        grad = eta0 * target.grad_potential(x) + lambda0 * x
        if np.linalg.norm(grad) <= alpha * tol:
            return x
        x = x - step * grad
    raise ConvergenceError(
        f"gradient descent did not reach tolerance {tol} in {max_iters} iterations"
    )


def _envelope(target: TargetOracle, eta0: float, lambda0: float, gd_tol: float | None):
    """Shared setup for rejection sampling: anchor point and envelope pieces."""
    beta = target.beta_smooth
    if not (0.0 <= eta0 <= 1.0):
        raise ValueError("eta0 must lie in [0, 1]")
    if lambda0 <= eta0 * beta:
        raise ValueError(
            f"lambda0 = {lambda0} must exceed eta0 * beta_smooth = {eta0 * beta}"
        )
    anchor = gd_minimize(target, eta0, lambda0, tol=gd_tol)
    grad_anchor = eta0 * target.grad_potential(anchor) + lambda0 * anchor
    pot_anchor = eta0 * target.potential(anchor) + 0.5 * lambda0 * float(anchor @ anchor)
    alpha = lambda0 - eta0 * beta
    proposal_mean = anchor - grad_anchor / alpha
    return anchor, grad_anchor, pot_anchor, alpha, proposal_mean


_LOG_ACCEPT_SLACK = 1e-9


def sample_pi0(
    target: TargetOracle,
    eta0: float,
    lambda0: float,
    rng: np.random.Generator,
    max_trials: int = 10**6,
    gd_tol: float | None = None,
) -> tuple[np.ndarray, int]:
    """One exact draw from the start density exp(-eta0*V - lambda0/2 ||x||^2).

    With eta0 == 0 the start is the Gaussian N(0, I/lambda0) and is drawn
    directly (zero trials).  Otherwise proposals come from the Gaussian
    envelope N(x' - grad V0(x')/alpha, I/alpha) with alpha =
    lambda0 - eta0*beta, and are accepted in the log domain.  Each trial
    costs exactly one potential evaluation.

    Returns the sample and the number of rejection trials.  Raises
    :class:`EnvelopeViolationError` if an acceptance probability exceeds
    1 + 1e-9 and :class:`RejectionCapError` beyond ``max_trials`` trials.
    """
    if eta0 == 0.0:
        if lambda0 <= 0:
            raise ValueError("lambda0 must be positive")
        return rng.standard_normal(target.dim) / np.sqrt(lambda0), 0
    anchor, grad_anchor, pot_anchor, alpha, proposal_mean = _envelope(
        target, eta0, lambda0, gd_tol
    )
    scale = 1.0 / np.sqrt(alpha)
    for trial in range(1, max_trials + 1):
        x = proposal_mean + scale * rng.standard_normal(target.dim)
        diff = x - anchor
        pot_x = eta0 * target.potential(x) + 0.5 * lambda0 * float(x @ x)
        log_accept = (
            -pot_x + pot_anchor + float(grad_anchor @ diff) + 0.5 * alpha * float(diff @ diff)
        )
        if log_accept > _LOG_ACCEPT_SLACK:
            raise EnvelopeViolationError(
                f"acceptance probability exp({log_accept}) exceeds 1; "
                "the supplied smoothness bound does not dominate the curvature"
            )
        if np.log(rng.random()) <= log_accept:
            return x, trial
    raise RejectionCapError(f"no acceptance within {max_trials} trials")


def sample_pi0_batch(
    target: TargetOracle,
    eta0: float,
    lambda0: float,
    rng: np.random.Generator,
    n: int,
    max_trials: int = 10**6,
    gd_tol: float | None = None,
) -> tuple[np.ndarray, int]:
    """n exact start-density draws with vectorized rejection trials.

    Same envelope as :func:`sample_pi0`; proposals are generated in chunks,
    so the variate sequence differs from n scalar calls.  Returns the
    samples, shape (n, d), and the total trial count.
    """
    if eta0 == 0.0:
        if lambda0 <= 0:
            raise ValueError("lambda0 must be positive")
        return rng.standard_normal((n, target.dim)) / np.sqrt(lambda0), 0
    anchor, grad_anchor, pot_anchor, alpha, proposal_mean = _envelope(
        target, eta0, lambda0, gd_tol
    )
    scale = 1.0 / np.sqrt(alpha)
    accepted = np.empty((n, target.dim))
    filled = 0
    trials = 0
    chunk = max(1024, 2 * n)
    while filled < n:
        if trials >= max_trials:
            raise RejectionCapError(f"no acceptance within {max_trials} trials")
        m = min(chunk, max_trials - trials)
        x = proposal_mean + scale * rng.standard_normal((m, target.dim))
        diff = x - anchor
        pot_x = eta0 * target.potential(x) + 0.5 * lambda0 * np.einsum("nd,nd->n", x, x)
        log_accept = (
            -pot_x
            + pot_anchor
            + diff @ grad_anchor
            + 0.5 * alpha * np.einsum("nd,nd->n", diff, diff)
        )
        worst = float(log_accept.max())
        if worst > _LOG_ACCEPT_SLACK:
            raise EnvelopeViolationError(
                f"acceptance probability exp({worst}) exceeds 1; "
                "the supplied smoothness bound does not dominate the curvature"
            )
        keep = np.log(rng.random(m)) <= log_accept
        trials += m
        take = x[keep][: n - filled]
        accepted[filled : filled + take.shape[0]] = take
        filled += take.shape[0]
    return accepted, trials
