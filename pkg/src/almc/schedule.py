"""Annealing schedules, time grids, and exponential-integrator coefficients.

A schedule is a pair of functions on [0, 1]: a target weight eta(.) that
ramps up to 1 and a quadratic-confinement strength lambda(.) that decays to
0.  The interpolation potential at progress theta is
eta(theta) * V + lambda(theta)/2 * ||x||^2.

One exponential-integrator step over [a, b] with total diffusion time T
factors into three coefficients:

    decay        lam0(b, a) = exp(-T * int_a^b lambda(u) du)
    drift gain   H(b, a)    = T * int_a^b eta(u) * lam0(b, u) du
    noise scale  lam1(b, a) = sqrt(2 T * int_a^b lam0(b, u)^2 du)

These integrate the linear confinement part of the drift exactly, so a step
with eta == 0 and constant lambda preserves the stationary Gaussian of the
corresponding Ornstein-Uhlenbeck process for any step size, and the choice
lambda == 0, eta == 1 collapses to a plain Langevin step (1, h, sqrt(2h)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate
from scipy.special import gamma as gamma_fn, gammainc

QUAD_ABS_TOL = 1e-10

# exp(-kappa * w) with kappa * w beyond this underflows the incomplete-gamma
# closed form; fall back to direct quadrature of the bounded integrand.
_CLOSED_FORM_EXPONENT_LIMIT = 500.0


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def _quad(f: Callable[[float], float], a: float, b: float) -> float:
    out = integrate.quad(f, a, b, epsabs=QUAD_ABS_TOL, epsrel=0.0, limit=200, full_output=1)
    if len(out) > 3:
        raise QuadratureError(f"integration on [{a}, {b}] failed: {out[3]}")
    return out[0]


@dataclass(frozen=True)
class AnnealingSchedule:
    """Annealing pair (eta, lambda) with family tags for closed forms.

    ``lam_family`` is one of "power" (lambda0 * (1-theta)^gamma), "constant",
    "zero", or "general"; ``eta_family`` is "constant" or "general".  The
    boundary conditions eta(1) = 1, lambda(1) = 0 are required of a schedule
    used as an annealing path but deliberately not enforced here: the
    coefficient algebra is also used for plain OU kernels (constant lambda,
    eta == 0), which are valid inputs for stepping but not for annealing.
    Call :meth:`validate` before using a schedule as a full path.
    """

    eta: Callable[[float], float]
    lam: Callable[[float], float]
    eta_family: str
    lam_family: str
    eta0: float
    lambda0: float
    gamma: float | None = None
    eta_const: float | None = None
    lam_const: float | None = None

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def power(cls, lambda0: float, gamma: float, eta_value: float = 1.0) -> "AnnealingSchedule":
        """Constant eta with lambda(theta) = lambda0 * (1 - theta)^gamma."""
        if lambda0 < 0:
            raise ValueError("lambda0 must be nonnegative")
        if gamma < 1:
            raise ValueError("power-family exponent must satisfy gamma >= 1")
        if lambda0 == 0:
            return cls.lmc(eta_value)
        return cls(
            eta=lambda theta: eta_value,
            lam=lambda theta: lambda0 * (1.0 - theta) ** gamma,
            eta_family="constant",
            lam_family="power",
            eta0=eta_value,
            lambda0=lambda0,
            gamma=float(gamma),
            eta_const=eta_value,
        )

    @classmethod
    def constant(cls, lam_value: float, eta_value: float) -> "AnnealingSchedule":
        """Constant pair; an OU kernel when eta_value == 0."""
        if lam_value < 0:
            raise ValueError("lambda must be nonnegative")
        family = "zero" if lam_value == 0 else "constant"
        return cls(
            eta=lambda theta: eta_value,
            lam=lambda theta: lam_value,
            eta_family="constant",
            lam_family=family,
            eta0=eta_value,
            lambda0=lam_value,
            eta_const=eta_value,
            lam_const=lam_value,
        )

    @classmethod
    def lmc(cls, eta_value: float = 1.0) -> "AnnealingSchedule":
        """lambda == 0: steps reduce to plain Langevin Monte Carlo."""
        return cls.constant(0.0, eta_value)

    @classmethod
    def general(
        cls, eta: Callable[[float], float], lam: Callable[[float], float]
    ) -> "AnnealingSchedule":
        """Arbitrary callables; all integrals go through adaptive quadrature."""
        return cls(
            eta=eta,
            lam=lam,
            eta_family="general",
            lam_family="general",
            eta0=float(eta(0.0)),
            lambda0=float(lam(0.0)),
        )

    @classmethod
    def from_config(cls, spec: dict) -> "AnnealingSchedule":
        """Build from ``{"eta": "const1", "lambda": {"family": ..., ...}}``."""
        eta_spec = spec.get("eta", "const1")
        if eta_spec == "const1":
            eta_value = 1.0
        elif isinstance(eta_spec, dict) and "const" in eta_spec:
            eta_value = float(eta_spec["const"])
        else:
            raise ValueError(f"unsupported eta spec: {eta_spec!r}")
        lam_spec = spec["lambda"]
        family = lam_spec["family"]
        if family == "power":
            return cls.power(float(lam_spec["lambda0"]), float(lam_spec["gamma"]), eta_value)
        if family == "constant":
            return cls.constant(float(lam_spec["value"]), eta_value)
        if family == "zero":
            return cls.lmc(eta_value)
        raise ValueError(f"unsupported lambda family: {family!r}")

    # ------------------------------------------------------------------
    # Validation
    # ------------------------------------------------------------------

    def validate(self, beta: float | None = None, check_points: int = 257) -> None:
        """Check the annealing-path boundary and monotonicity conditions.

        eta must be nondecreasing with eta(1) = 1; lambda nonincreasing with
        lambda(1) = 0.  When ``beta`` (a smoothness bound for the paired
        target) is given and eta0 > 0, requires lambda0 > eta0 * beta so the
        initial potential is strongly convex.
        """
        thetas = np.linspace(0.0, 1.0, check_points)
        etas = np.array([self.eta(t) for t in thetas])
        lams = np.array([self.lam(t) for t in thetas])
        if abs(etas[-1] - 1.0) > 1e-12:
            raise ValueError(f"eta(1) must equal 1, got {etas[-1]!r}")
        if abs(lams[-1]) > 1e-12:
            raise ValueError(f"lambda(1) must equal 0, got {lams[-1]!r}")
        if np.any(np.diff(etas) < -1e-12):
            raise ValueError("eta must be nondecreasing")
        if np.any(np.diff(lams) > 1e-12):
            raise ValueError("lambda must be nonincreasing")
        if np.any(etas < -1e-12) or np.any(etas > 1.0 + 1e-12):
            raise ValueError("eta must take values in [0, 1]")
        if np.any(lams < -1e-12):
            raise ValueError("lambda must be nonnegative")
        if beta is not None and self.eta0 > 0 and self.lambda0 <= self.eta0 * beta:
            raise ValueError(
                f"lambda0 = {self.lambda0} must exceed eta0 * beta = {self.eta0 * beta}"
            )


def default_lambda0(eta0: float, dim: int, beta: float) -> float:
    """Initial confinement strength eta0 * d * beta.

    Makes the start of the anneal strongly log-concave with a dimension-free
    expected rejection-trial count; beta must be a smoothness bound for the
    paired target's potential.
    """
    return eta0 * dim * beta


def lambda_integral(schedule: AnnealingSchedule, a: float, b: float) -> float:
    """Integral of lambda over [a, b], closed form where the family allows."""
    if a > b:
        raise ValueError(f"interval endpoints must satisfy a <= b, got ({a}, {b})")
    if a == b:
        return 0.0
    if schedule.lam_family == "zero":
        return 0.0
    if schedule.lam_family == "constant":
        return schedule.lam_const * (b - a)
    if schedule.lam_family == "power":
        p = schedule.gamma + 1.0
        return schedule.lambda0 * ((1.0 - a) ** p - (1.0 - b) ** p) / p
    return _quad(schedule.lam, a, b)


@dataclass(frozen=True)
class StepCoefficients:
    """One step's (decay, drift gain, noise scale) triple.

    Invariants for a step over [a, b] with total time T and eta <= 1:
    lam0 in (0, 1], H <= T*(b-a), lam1^2 <= 2*T*(b-a).
    """

    lam0: float
    drift_weight: float
    noise_scale: float

    def __post_init__(self):
        if not (0.0 < self.lam0 <= 1.0 + 1e-12):
            raise ValueError(f"decay must lie in (0, 1], got {self.lam0!r}")
        if self.drift_weight < 0 or self.noise_scale < 0:
            raise ValueError("drift weight and noise scale must be nonnegative")


def _closed_power_exposure(
    schedule: AnnealingSchedule, T: float, a: float, b: float, scale: float
) -> float | None:
    """Closed form for int_a^b exp(-scale * T * int_u^b lambda) du.

    Substituting w = (1-u)^(gamma+1) reduces the integral to a difference of
    regularized lower incomplete gamma functions.  Returns None when the
    rescaling factor exp(kappa * w_b) would overflow; callers then fall back
    to quadrature of the bounded integrand.
    """
    p = schedule.gamma + 1.0
    kappa = scale * T * schedule.lambda0 / p
    if kappa == 0.0:
        return b - a
    w_a = (1.0 - a) ** p
    w_b = (1.0 - b) ** p
    if kappa * w_b > _CLOSED_FORM_EXPONENT_LIMIT:
        return None
    s = 1.0 / p
    bracket = gammainc(s, kappa * w_a) - gammainc(s, kappa * w_b)
    return math.exp(kappa * w_b) * gamma_fn(s) * kappa ** (-s) * bracket / p


def step_coefficients(
    schedule: AnnealingSchedule, T: float, a: float, b: float, method: str = "auto"
) -> StepCoefficients:
    """Coefficients for one exponential-integrator step over [a, b].

    ``method`` selects the evaluation path: "closed" insists on closed forms
    (constant/zero lambda with constant eta, or power lambda with constant
    eta via incomplete gamma functions), "quadrature" forces adaptive
    quadrature with absolute tolerance 1e-10, and "auto" prefers closed
    forms where the family allows.
    """
    if not (0.0 <= a <= b <= 1.0):
        raise ValueError(f"need 0 <= a <= b <= 1, got ({a}, {b})")
    if T <= 0:
        raise ValueError("total time must be positive")
    if a == b:
        return StepCoefficients(1.0, 0.0, 0.0)
    if method not in ("auto", "closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")

    lam0 = math.exp(-T * lambda_integral(schedule, a, b))
    h = T * (b - a)
    eta_is_const = schedule.eta_family == "constant"

    if method != "quadrature":
        if schedule.lam_family == "zero" and eta_is_const:
            return StepCoefficients(1.0, schedule.eta_const * h, math.sqrt(2.0 * h))
        if schedule.lam_family == "constant" and eta_is_const:
            c = schedule.lam_const
            return StepCoefficients(
                lam0,
                schedule.eta_const * (1.0 - math.exp(-c * h)) / c,
                math.sqrt((1.0 - math.exp(-2.0 * c * h)) / c),
            )
        if schedule.lam_family == "power" and eta_is_const:
            drift_exposure = _closed_power_exposure(schedule, T, a, b, scale=1.0)
            noise_exposure = _closed_power_exposure(schedule, T, a, b, scale=2.0)
            if drift_exposure is not None and noise_exposure is not None:
                return StepCoefficients(
                    lam0,
                    T * schedule.eta_const * drift_exposure,
                    math.sqrt(2.0 * T * noise_exposure),
                )
            if method == "closed":
                raise QuadratureError(
                    "closed form unavailable: incomplete-gamma rescaling overflows"
                )
        if method == "closed":
            raise QuadratureError(
                f"no closed form for families ({schedule.eta_family}, {schedule.lam_family})"
            )

    def decay_from(u: float) -> float:
        return math.exp(-T * lambda_integral(schedule, u, b))

    drift = T * _quad(lambda u: schedule.eta(u) * decay_from(u), a, b)
    noise_sq = 2.0 * T * _quad(lambda u: decay_from(u) ** 2, a, b)
    return StepCoefficients(lam0, drift, math.sqrt(noise_sq))


@dataclass(frozen=True)
class ThetaGrid:
    """Discretization 0 = theta_0 < ... < theta_M = 1 with total time T.

    The singleton grid [0.0] is the degenerate zero-step case: a run over it
    returns its start unchanged.
    """

    total_time: float
    thetas: np.ndarray

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "total_time", float(self.total_time))
        if self.total_time <= 0:
            raise ValueError("total time must be positive")
        if thetas.ndim != 1 or thetas.shape[0] < 1:
            raise ValueError("grid needs at least one point")
        if thetas.shape[0] == 1:
            if thetas[0] != 0.0:
                raise ValueError("a zero-step grid must be exactly [0.0]")
            return
        if thetas[0] != 0.0 or thetas[-1] != 1.0:
            raise ValueError("grid endpoints must be exactly 0 and 1")
        if np.any(np.diff(thetas) <= 0):
            raise ValueError("grid must be strictly increasing")

    @property
    def num_steps(self) -> int:
        return self.thetas.shape[0] - 1

    @property
    def step_times(self) -> np.ndarray:
        """Per-step diffusion times h_l = T * (theta_l - theta_{l-1})."""
        return self.total_time * np.diff(self.thetas)

    @classmethod
    def uniform(cls, num_steps: int, total_time: float) -> "ThetaGrid":
        thetas = np.arange(num_steps + 1, dtype=float) / num_steps
        thetas[-1] = 1.0
        return cls(total_time=total_time, thetas=thetas)

    @classmethod
    def from_steps(cls, steps: np.ndarray) -> "ThetaGrid":
        """Grid whose l-th interval has diffusion time steps[l-1]."""
        steps = np.asarray(steps, dtype=float)
        if np.any(steps <= 0):
            raise ValueError("step times must be positive")
        total = float(steps.sum())
        thetas = np.concatenate([[0.0], np.cumsum(steps) / total])
        thetas[-1] = 1.0
        return cls(total_time=total, thetas=thetas)


def quadratic_step_sizes(num_steps: int, s_min: float, s_max: float) -> np.ndarray:
    """Per-iteration step times rising from s_min to s_max and back.

    Step l of M is s_max - (s_max - s_min) * (l - M/2)^2 / (M^2/4), which
    peaks at mid-run and equals s_min at the ends.
    """
    if num_steps < 1:
        raise ValueError("need at least one step")
    if not (0 < s_min <= s_max):
        raise ValueError("need 0 < s_min <= s_max")
    ell = np.arange(1, num_steps + 1, dtype=float)
    half = num_steps / 2.0
    return s_max - (s_max - s_min) / (num_steps**2 / 4.0) * (ell - half) ** 2


def grid_from_quadratic_steps(num_steps: int, s_min: float, s_max: float) -> ThetaGrid:
    """Grid whose step times follow the quadratic ramp of ``quadratic_step_sizes``."""
    return ThetaGrid.from_steps(quadratic_step_sizes(num_steps, s_min, s_max))


def plan_parameters(
    action: float, epsilon: float, dim: int, beta: float
) -> tuple[float, int]:
    """Advisory (T, M) from the action-based accuracy heuristics.

    T = action / (4 epsilon^2) and M = ceil(d beta^2 action^2 / epsilon^6),
    with all hidden universal constants set to 1.  Runs tune M empirically;
    this is a starting point, not a guarantee.
    """
    if action <= 0 or epsilon <= 0 or dim <= 0 or beta <= 0:
        raise ValueError("all planner inputs must be positive")
    total_time = action / (4.0 * epsilon**2)
    num_steps = math.ceil(dim * beta**2 * action**2 / epsilon**6)
    return total_time, num_steps


_GL_NODES, _GL_WEIGHTS = leggauss(48)


def coefficients_for_grid(
    schedule: AnnealingSchedule, grid: ThetaGrid
) -> list[StepCoefficients]:
    """Coefficients for every grid interval.

    For the closed-form families with constant eta the per-interval integrals
    are evaluated with fixed-order Gauss-Legendre vectorized across all
    intervals (the integrands are analytic and each interval is tiny, so the
    rule is far inside its accuracy budget); anything else falls back to the
    adaptive scalar path interval by interval.
    """
    T = float(grid.total_time)
    a = grid.thetas[:-1]
    b = grid.thetas[1:]
    eta_is_const = schedule.eta_family == "constant"
    if not eta_is_const or schedule.lam_family == "general":
        return [
            step_coefficients(schedule, T, float(lo), float(hi))
            for lo, hi in zip(a, b)
        ]
    if schedule.lam_family in ("zero", "constant"):
        # exact closed forms; keeps the lambda == 0 case bit-identical to a
        # plain Langevin step
        return [
            step_coefficients(schedule, T, float(lo), float(hi))
            for lo, hi in zip(a, b)
        ]

    p = schedule.gamma + 1.0
    cumulative = schedule.lambda0 * (1.0 - (1.0 - grid.thetas) ** p) / p
    lam0 = np.exp(-T * np.diff(cumulative))

    # u-nodes per interval, shape (M, n_nodes)
    mid = 0.5 * (a + b)[:, None]
    halfwidth = 0.5 * (b - a)[:, None]
    u = mid + halfwidth * _GL_NODES[None, :]
    cum_u = schedule.lambda0 * (1.0 - (1.0 - u) ** p) / p
    cum_b = schedule.lambda0 * (1.0 - (1.0 - b) ** p) / p
    exposure = -T * (cum_b[:, None] - cum_u)  # log decay from u to interval end
    drift = T * schedule.eta_const * (np.exp(exposure) @ _GL_WEIGHTS) * halfwidth[:, 0]
    noise = np.sqrt(2.0 * T * (np.exp(2.0 * exposure) @ _GL_WEIGHTS) * halfwidth[:, 0])
    return [
        StepCoefficients(float(l0), float(h), float(n))
        for l0, h, n in zip(np.minimum(lam0, 1.0), drift, noise)
    ]
