"""Shared independent oracles: finite differences and counting proxies.

These deliberately avoid the library's own code paths so that every check
compares two independent routes to the same number.
"""

from __future__ import annotations

import numpy as np
import pytest


def finite_difference_gradient(f, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for j in range(x.shape[0]):
        e = np.zeros_like(x)
        e[j] = h
        grad[j] = (f(x + e) - f(x - e)) / (2.0 * h)
    return grad


def finite_difference_hessian(f, x: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian of a scalar function."""
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    hess = np.empty((d, d))
    for i in range(d):
        for j in range(d):
            ei = np.zeros(d)
            ej = np.zeros(d)
            ei[i] = h
            ej[j] = h
            hess[i, j] = (
                f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
            ) / (4.0 * h * h)
    return 0.5 * (hess + hess.T)


class CountingTarget:
    """Proxy that counts potential and gradient evaluations (rows for batches)."""

    def __init__(self, inner):
        self.inner = inner
        self.potential_calls = 0
        self.grad_calls = 0

    @property
    def dim(self):
        return self.inner.dim

    @property
    def beta_smooth(self):
        return self.inner.beta_smooth

    @property
    def minimizer_radius(self):
        return self.inner.minimizer_radius

    def potential(self, x):
        x = np.asarray(x)
        self.potential_calls += 1 if x.ndim == 1 else x.shape[0]
        return self.inner.potential(x)

    def grad_potential(self, x):
        x = np.asarray(x)
        self.grad_calls += 1 if x.ndim == 1 else x.shape[0]
        return self.inner.grad_potential(x)


class ZeroTarget:
    """Flat potential: pure Brownian increments under plain Langevin."""

    def __init__(self, dim: int = 2):
        self.dim = dim
        self.beta_smooth = 0.0
        self.minimizer_radius = 0.0

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        return 0.0 if x.ndim == 1 else np.zeros(x.shape[0])

    def grad_potential(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


@pytest.fixture
def six_mode_r2():
    from almc import ring_mixture

    return ring_mixture(6, 2.0, 10.0)
