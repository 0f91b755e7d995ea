"""Potential, gradient, and smoothness oracles for mixture targets."""

import json

import numpy as np
import pytest

from almc import GaussianMixtureTarget, QuadraticTarget, TargetOracle, ring_mixture
from conftest import finite_difference_gradient, finite_difference_hessian


class TestConstruction:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum to 1"):
            GaussianMixtureTarget(weights=[0.5, 0.6], means=[[0.0], [1.0]], precision=1.0)

    def test_weights_must_be_positive(self):
        with pytest.raises(ValueError, match="positive"):
            GaussianMixtureTarget(weights=[1.0, 0.0], means=[[0.0], [1.0]], precision=1.0)

    def test_precision_must_be_positive(self):
        with pytest.raises(ValueError):
            GaussianMixtureTarget(weights=[1.0], means=[[0.0]], precision=0.0)

    def test_ragged_means_rejected(self):
        with pytest.raises(ValueError):
            GaussianMixtureTarget(weights=[0.5, 0.5], means=[[0.0], [1.0, 2.0]], precision=1.0)

    def test_dimension_mismatch_is_input_error(self, six_mode_r2):
        with pytest.raises(ValueError, match="dimension"):
            six_mode_r2.potential(np.zeros(3))
        with pytest.raises(ValueError, match="dimension"):
            six_mode_r2.grad_potential(np.zeros((5, 3)))

    def test_satisfies_target_protocol(self, six_mode_r2):
        assert isinstance(six_mode_r2, TargetOracle)
        assert isinstance(QuadraticTarget(precision=2.0, dim=3), TargetOracle)

    def test_json_round_trip(self, six_mode_r2):
        rebuilt = GaussianMixtureTarget.from_json(json.dumps(six_mode_r2.to_json()))
        np.testing.assert_allclose(rebuilt.means, six_mode_r2.means)
        np.testing.assert_allclose(rebuilt.weights, six_mode_r2.weights)
        assert rebuilt.precision == six_mode_r2.precision

    def test_ring_geometry(self):
        target = ring_mixture(6, 2.0, 10.0)
        np.testing.assert_allclose(np.linalg.norm(target.means, axis=1), 2.0)
        np.testing.assert_allclose(target.means[0], [2.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(target.means[3], [-2.0, 0.0], atol=1e-15)
        assert target.radius == pytest.approx(2.0)


class TestPotential:
    def test_single_component_is_quadratic(self):
        target = GaussianMixtureTarget(weights=[1.0], means=[[0.0, 0.0]], precision=10.0)
        assert target.potential(np.array([1.0, 0.0])) == pytest.approx(5.0)

    def test_symmetric_pair_is_even(self):
        target = GaussianMixtureTarget(
            weights=[0.5, 0.5], means=[[1.5, 0.5], [-1.5, -0.5]], precision=4.0
        )
        rng = np.random.default_rng(7)
        for x in rng.standard_normal((20, 2)) * 3.0:
            assert target.potential(x) == pytest.approx(target.potential(-x), abs=1e-12)

    def test_six_mode_value_matches_extended_precision_sum(self, six_mode_r2):
        # direct summation of (1/6) exp(-5 ||x - y_k||^2) at 60-digit precision
        assert six_mode_r2.potential(np.array([2.0, 0.0])) == pytest.approx(
            1.7917594651057478, abs=1e-10
        )

    def test_batch_agrees_with_scalar(self, six_mode_r2):
        rng = np.random.default_rng(0)
        pts = rng.standard_normal((40, 2)) * 4.0
        batch = six_mode_r2.potential(pts)
        singles = np.array([six_mode_r2.potential(p) for p in pts])
        np.testing.assert_allclose(batch, singles, rtol=0, atol=1e-12)

    def test_finite_far_into_the_tails(self):
        # exponents reach ~ -4.5e4 here; the log-domain path must not overflow
        target = ring_mixture(6, 30.0, 10.0)
        rng = np.random.default_rng(3)
        direction = rng.standard_normal((200, 2))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        pts = direction * rng.uniform(0.0, 60.0, size=(200, 1))
        assert np.all(np.isfinite(target.potential(pts)))
        assert np.all(np.isfinite(target.grad_potential(pts)))


class TestGradient:
    def test_single_component(self):
        target = GaussianMixtureTarget(weights=[1.0], means=[[0.0, 0.0]], precision=10.0)
        np.testing.assert_allclose(target.grad_potential(np.array([1.0, 0.0])), [10.0, 0.0])

    def test_vanishes_at_symmetric_center(self):
        target = GaussianMixtureTarget(
            weights=[0.5, 0.5], means=[[2.0, 0.0], [-2.0, 0.0]], precision=10.0
        )
        np.testing.assert_allclose(target.grad_potential(np.zeros(2)), [0.0, 0.0], atol=1e-12)

    def test_odd_under_negation(self, six_mode_r2):
        rng = np.random.default_rng(11)
        for x in rng.standard_normal((20, 2)) * 4.0:
            np.testing.assert_allclose(
                six_mode_r2.grad_potential(-x), -six_mode_r2.grad_potential(x), atol=1e-12
            )

    @pytest.mark.parametrize("r", [2.0, 30.0])
    def test_matches_finite_differences(self, r):
        target = ring_mixture(6, r, 10.0)
        rng = np.random.default_rng(21)
        pts = rng.uniform(-3.0 * r, 3.0 * r, size=(100, 2))
        for x in pts:
            grad = target.grad_potential(x)
            fd = finite_difference_gradient(target.potential, x)
            err = np.linalg.norm(grad - fd) / (1.0 + np.linalg.norm(grad))
            assert err < 1e-5


class TestSmoothnessBound:
    def test_single_component_returns_precision(self):
        target = GaussianMixtureTarget(weights=[1.0], means=[[3.0, 4.0]], precision=10.0)
        assert target.smoothness_bound() == pytest.approx(10.0)

    def test_ring_formula(self, six_mode_r2):
        # beta * (4 r^2 beta + 1) with beta = 10, r = 2
        assert six_mode_r2.smoothness_bound() == pytest.approx(1610.0)

    def test_bound_dominates_numerical_hessian(self, six_mode_r2):
        rng = np.random.default_rng(5)
        bound = six_mode_r2.smoothness_bound()
        pts = rng.uniform(-4.0, 4.0, size=(1000, 2))
        for x in pts:
            hess = finite_difference_hessian(six_mode_r2.potential, x)
            assert np.linalg.norm(hess, ord=2) <= bound

    def test_hessian_eigenvalues_inside_sandwich(self, six_mode_r2):
        beta = six_mode_r2.precision
        lo, hi = six_mode_r2.hessian_eigenvalue_bounds()
        maxdist = 4.0  # diametrically opposite modes at radius 2
        assert lo == pytest.approx(beta - maxdist**2 * beta**2 / 2.0)
        assert hi == pytest.approx(beta)
        tol = 1e-3 * beta
        rng = np.random.default_rng(13)
        for x in rng.uniform(-3.0, 3.0, size=(200, 2)):
            eigs = np.linalg.eigvalsh(finite_difference_hessian(six_mode_r2.potential, x))
            assert eigs.min() >= lo - tol
            assert eigs.max() <= hi + tol


class TestSamplingAndTilt:
    def test_exact_sampler_moments(self, six_mode_r2):
        rng = np.random.default_rng(2)
        draws = six_mode_r2.sample(200_000, rng)
        # symmetric ring: mean 0, per-coordinate variance r^2/2 + 1/beta
        np.testing.assert_allclose(draws.mean(axis=0), [0.0, 0.0], atol=0.02)
        np.testing.assert_allclose(draws.var(axis=0), 2.0 + 0.1, atol=0.03)

    def test_tilted_density_is_proportional(self, six_mode_r2):
        lam = 5.0
        tilted = six_mode_r2.tilted(lam)
        rng = np.random.default_rng(9)
        pts = rng.standard_normal((50, 2)) * 2.0
        # -log of the tilted density should differ from V(x) + lam ||x||^2 / 2
        # by a constant
        direct = six_mode_r2.potential(pts) + 0.5 * lam * np.einsum("nd,nd->n", pts, pts)
        via_tilt = tilted.potential(pts)
        shifts = direct - via_tilt
        np.testing.assert_allclose(shifts, shifts[0], atol=1e-9)

    def test_tilt_of_ring_keeps_uniform_weights(self, six_mode_r2):
        tilted = six_mode_r2.tilted(5.0)
        np.testing.assert_allclose(tilted.weights, 1.0 / 6.0, atol=1e-15)
        assert tilted.precision == pytest.approx(15.0)
        np.testing.assert_allclose(
            np.linalg.norm(tilted.means, axis=1), 2.0 * 10.0 / 15.0
        )


class TestQuadraticTarget:
    def test_potential_and_gradient(self):
        target = QuadraticTarget(precision=4.0, center=[1.0, -1.0])
        assert target.potential(np.array([1.0, -1.0])) == pytest.approx(0.0)
        np.testing.assert_allclose(
            target.grad_potential(np.array([2.0, 0.0])), [4.0, 4.0]
        )
        assert target.beta_smooth == pytest.approx(4.0)
        assert target.minimizer_radius == pytest.approx(np.sqrt(2.0))
