"""Target distributions with potential / gradient / smoothness oracles.

Targets are unnormalized densities pi ~ exp(-V).  The potential V is only
defined up to an additive constant (the normalizer is dropped); every
consumer works with potential differences or gradients, so this is safe.

The main concrete target is an isotropic Gaussian mixture with a shared
precision.  All log-density work is done in the log domain: exponents of
magnitude ~ beta * r^2 / 2 easily exceed the floating-point range for
well-separated modes, so responsibilities are computed with a max-subtracted
softmax and potentials with log-sum-exp.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np
from scipy.special import logsumexp


@runtime_checkable
class TargetOracle(Protocol):
    """Minimal capability a sampler needs from a target.

    Attributes:
        dim: Dimensionality d.
        beta_smooth: A constant B such that -B*I <= Hessian(V) <= B*I.
        minimizer_radius: A radius R with ||x*|| <= R for some global
            minimizer x* of V.
    """

    dim: int
    beta_smooth: float
    minimizer_radius: float

    def potential(self, x: np.ndarray) -> np.ndarray | float: ...

    def grad_potential(self, x: np.ndarray) -> np.ndarray: ...


def _check_points(x: np.ndarray, dim: int) -> tuple[np.ndarray, bool]:
    """Coerce ``x`` to (n, d), remembering whether it was a single point."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {x.shape}")
    return x, single


@dataclass(frozen=True)
class GaussianMixtureTarget:
    """Mixture sum_i w_i N(y_i, I/precision) with shared isotropic precision.

    Attributes:
        weights: Strictly positive mixing weights, shape (K,), summing to 1.
        means: Component means, shape (K, d).
        precision: Shared inverse variance beta > 0.
    """

    weights: np.ndarray
    means: np.ndarray
    precision: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        m = np.atleast_2d(np.asarray(self.means, dtype=float))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "precision", float(self.precision))
        if w.ndim != 1 or w.shape[0] != m.shape[0]:
            raise ValueError("weights and means must have matching component counts")
        if np.any(w <= 0):
            raise ValueError("weights must be strictly positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 (got {w.sum()!r})")
        if m.shape[1] < 1:
            raise ValueError("means must have dimension >= 1")
        if self.precision <= 0:
            raise ValueError("precision must be strictly positive")

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    @property
    def num_components(self) -> int:
        return self.means.shape[0]

    @property
    def radius(self) -> float:
        """Largest component-mean norm, max_i ||y_i||."""
        return float(np.max(np.linalg.norm(self.means, axis=1)))

    @property
    def beta_smooth(self) -> float:
        return self.smoothness_bound()

    @property
    def minimizer_radius(self) -> float:
        # Any stationary point of V is a responsibility-weighted average of
        # the means, hence inside their convex hull.
        return self.radius

    def _log_component_weights(self, x: np.ndarray) -> np.ndarray:
        """Log of w_i * exp(-(beta/2)||x-y_i||^2) for each component, (n, K)."""
        diff = x[:, None, :] - self.means[None, :, :]
        sq = np.einsum("nkd,nkd->nk", diff, diff)
        return np.log(self.weights)[None, :] - 0.5 * self.precision * sq

    def potential(self, x: np.ndarray) -> np.ndarray | float:
        """Evaluate V(x) = -log sum_i w_i exp(-(beta/2)||x-y_i||^2).

        The shared Gaussian normalizer is dropped.  Accepts a single point
        (d,) or a batch (n, d); returns a scalar or (n,) correspondingly.
        """
        pts, single = _check_points(x, self.dim)
        value = -logsumexp(self._log_component_weights(pts), axis=1)
        return float(value[0]) if single else value

    def grad_potential(self, x: np.ndarray) -> np.ndarray:
        """Evaluate grad V(x) = beta * (x - sum_i resp_i(x) y_i).

        Responsibilities resp_i are the softmax of the log component weights,
        computed with max subtraction for stability.
        """
        pts, single = _check_points(x, self.dim)
        logits = self._log_component_weights(pts)
        logits -= logits.max(axis=1, keepdims=True)
        resp = np.exp(logits)
        resp /= resp.sum(axis=1, keepdims=True)
        grad = self.precision * (pts - resp @ self.means)
        return grad[0] if single else grad

    def smoothness_bound(self) -> float:
        """Return B with -B*I <= Hessian(V) <= B*I.

        A single component is exactly a quadratic, so B = beta.  Otherwise
        B = beta * (4 r^2 beta + 1) with r = max_i ||y_i||.
        """
        if self.num_components == 1:
            return self.precision
        beta, r = self.precision, self.radius
        return beta * (4.0 * r * r * beta + 1.0)

    def hessian_eigenvalue_bounds(self) -> tuple[float, float]:
        """Two-sided Hessian bounds from the pairwise mean spread.

        Returns (lo, hi) with lo*I <= Hessian(V) <= hi*I, where
        hi = beta and lo = beta - maxdist^2 * beta^2 / 2 for
        maxdist = max_{i,j} ||y_i - y_j||.  Sharper than the norm-based
        bound when means are not centered at the origin.
        """
        beta = self.precision
        diff = self.means[:, None, :] - self.means[None, :, :]
        maxdist_sq = float(np.max(np.einsum("ijd,ijd->ij", diff, diff)))
        return beta - 0.5 * maxdist_sq * beta * beta, beta

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n exact samples (component selection + Gaussian), (n, d)."""
        comp = rng.choice(self.num_components, size=n, p=self.weights)
        noise = rng.standard_normal((n, self.dim)) / np.sqrt(self.precision)
        return self.means[comp] + noise

    def tilted(self, lam: float) -> "GaussianMixtureTarget":
        """Mixture proportional to pi(x) * exp(-lam ||x||^2 / 2).

        Multiplying each component by the Gaussian factor and completing the
        square gives another isotropic mixture: component i moves to
        beta*y_i/(lam+beta) with precision lam+beta, and its weight picks up
        the factor exp(-lam*beta*||y_i||^2 / (2(lam+beta))) before
        renormalization.
        """
        if lam < 0:
            raise ValueError("tilt strength must be nonnegative")
        beta = self.precision
        shrink = beta / (lam + beta)
        norms_sq = np.einsum("kd,kd->k", self.means, self.means)
        log_w = np.log(self.weights) - 0.5 * lam * shrink * norms_sq
        log_w -= logsumexp(log_w)
        return GaussianMixtureTarget(
            weights=np.exp(log_w),
            means=shrink * self.means,
            precision=lam + beta,
        )

    @classmethod
    def from_json(cls, document: str | dict) -> "GaussianMixtureTarget":
        """Build from ``{"weights": [...], "means": [[...], ...], "precision": b}``."""
        spec = json.loads(document) if isinstance(document, str) else document
        return cls(
            weights=np.asarray(spec["weights"], dtype=float),
            means=np.asarray(spec["means"], dtype=float),
            precision=float(spec["precision"]),
        )

    def to_json(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "precision": self.precision,
        }


def ring_mixture(num_modes: int, r: float, precision: float) -> GaussianMixtureTarget:
    """Equally weighted modes on a circle of radius r in the plane.

    Mode k sits at (r cos(2 pi k / K), r sin(2 pi k / K)).
    """
    if num_modes < 1:
        raise ValueError("num_modes must be >= 1")
    angles = 2.0 * np.pi * np.arange(num_modes) / num_modes
    means = r * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    weights = np.full(num_modes, 1.0 / num_modes)
    return GaussianMixtureTarget(weights=weights, means=means, precision=precision)


@dataclass(frozen=True)
class QuadraticTarget:
    """Gaussian target with potential V(x) = (beta/2) ||x - center||^2."""

    precision: float
    center: np.ndarray = field(default=None)  # type: ignore[assignment]
    dim: int = 2

    def __post_init__(self):
        if self.precision <= 0:
            raise ValueError("precision must be strictly positive")
        center = (
            np.zeros(self.dim)
            if self.center is None
            else np.asarray(self.center, dtype=float)
        )
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "dim", center.shape[0])

    @property
    def beta_smooth(self) -> float:
        return self.precision

    @property
    def minimizer_radius(self) -> float:
        return float(np.linalg.norm(self.center))

    def potential(self, x: np.ndarray) -> np.ndarray | float:
        pts, single = _check_points(x, self.dim)
        diff = pts - self.center
        value = 0.5 * self.precision * np.einsum("nd,nd->n", diff, diff)
        return float(value[0]) if single else value

    def grad_potential(self, x: np.ndarray) -> np.ndarray:
        pts, single = _check_points(x, self.dim)
        grad = self.precision * (pts - self.center)
        return grad[0] if single else grad
