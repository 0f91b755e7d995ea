"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every tolerance is pinned here, not calibrated elsewhere.  Criterion 9 is
known-red: under the grid-search definition of the iteration requirement and
the prescribed budget grids, the measured requirement saturates at the grid
bottoms and the fitted slope is 1.90, outside the stated [2.0, 3.7] window.
The full analysis (including transition-resolving scans showing the true
requirement is nearly radius-independent on these ring targets) lives in the
project notes; the test stays faithful to the stated criterion and fails.
"""

import time

import numpy as np
import pytest

from almc import (
    AnnealingSchedule,
    ExperimentConfig,
    GaussianMixtureTarget,
    QuadraticTarget,
    ThetaGrid,
    gaussian_w2,
    heat_curve_action,
    iterations_to_threshold,
    knn_kl,
    loglog_fit,
    mode_coverage,
    mog_action_bound,
    ring_mixture,
    rng_stream,
    run_almc,
    run_almc_batch,
    run_lmc,
    run_lmc_batch,
    run_sweep,
    sample_pi0_batch,
    step_coefficients,
)
from almc.harness import default_m_grid
from almc.samplers import run_almc_batch as almc_batch
from conftest import ZeroTarget, finite_difference_gradient

APP_SCHEDULE = AnnealingSchedule.power(5.0, 10.0)


def report(num: int, name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:02d} {name}: {status}  {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


class TestCriterion01LmcReduction:
    def test_shared_noise_trajectories_coincide(self):
        start = time.perf_counter()
        target = ring_mixture(6, 2.0, 10.0)
        M, T = 1000, 1.0
        grid = ThetaGrid.uniform(M, T)
        init = np.array([0.5, -0.5])
        almc = run_almc(
            target, AnnealingSchedule.lmc(), grid, rng_stream(101), init, trace=True
        )
        lmc = run_lmc(target, T / M, M, rng_stream(101), init, trace=True)
        diff = float(np.max(np.abs(almc.trajectory - lmc.trajectory)))
        elapsed = time.perf_counter() - start
        report(
            1,
            "LMC reduction",
            diff < 1e-12 and elapsed < 1.0,
            f"max coordinate diff {diff:.2e} over {M} steps in {elapsed:.2f}s",
        )


class TestCriterion02OuExactness:
    def test_stationary_gaussian_preserved(self):
        start = time.perf_counter()
        n, lam = 100_000, 4.0
        sched = AnnealingSchedule.constant(lam, 0.0)
        grid = ThetaGrid.from_steps([0.05, 0.71, 0.003, 0.4, 1.3, 0.02])
        rng = rng_stream(202)
        inits = rng.standard_normal((n, 2)) * 0.5
        finals = almc_batch(ZeroTarget(dim=2), sched, grid, rng, inits)
        mean_se = 0.5 / np.sqrt(n)
        var_se = 0.25 * np.sqrt(2.0 / (n - 1))
        mean_ok = bool(np.all(np.abs(finals.mean(axis=0)) < 3.0 * mean_se))
        var_ok = bool(np.all(np.abs(finals.var(axis=0) - 0.25) < 3.0 * var_se))
        elapsed = time.perf_counter() - start
        report(
            2,
            "OU exactness",
            mean_ok and var_ok and elapsed < 10.0,
            f"means {finals.mean(axis=0).round(5)}, vars {finals.var(axis=0).round(5)} "
            f"(target 0.25 +/- {3 * var_se:.5f}) in {elapsed:.1f}s",
        )


class TestCriterion03CoefficientOracles:
    def test_closed_vs_quadrature_and_semigroup(self):
        start = time.perf_counter()
        rng = np.random.default_rng(303)
        worst_pair = 0.0
        for _ in range(1000):
            a, b = np.sort(rng.uniform(0.0, 1.0, size=2))
            if b - a < 1e-9:
                continue
            T = rng.uniform(0.1, 10.0)
            closed = step_coefficients(APP_SCHEDULE, T, a, b, method="closed")
            quad = step_coefficients(APP_SCHEDULE, T, a, b, method="quadrature")
            worst_pair = max(
                worst_pair,
                abs(closed.lam0 - quad.lam0),
                abs(closed.drift_weight - quad.drift_weight),
                abs(closed.noise_scale - quad.noise_scale),
            )
        worst_semi = 0.0
        for _ in range(1000):
            a, b, c = np.sort(rng.uniform(0.0, 1.0, size=3))
            T = rng.uniform(0.1, 10.0)
            full = step_coefficients(APP_SCHEDULE, T, a, c).lam0
            split = (
                step_coefficients(APP_SCHEDULE, T, a, b).lam0
                * step_coefficients(APP_SCHEDULE, T, b, c).lam0
            )
            worst_semi = max(worst_semi, abs(full - split))
        elapsed = time.perf_counter() - start
        report(
            3,
            "Coefficient oracles",
            worst_pair < 1e-8 and worst_semi < 1e-10 and elapsed < 5.0,
            f"closed-vs-quadrature max {worst_pair:.2e}, semigroup max {worst_semi:.2e} "
            f"in {elapsed:.1f}s",
        )


class TestCriterion04GradientCorrectness:
    def test_finite_difference_agreement(self):
        start = time.perf_counter()
        worst = 0.0
        finite = True
        for r in (2.0, 30.0):
            target = ring_mixture(6, r, 10.0)
            rng = np.random.default_rng(404)
            for x in rng.uniform(-3.0 * r, 3.0 * r, size=(100, 2)):
                grad = target.grad_potential(x)
                finite &= bool(np.all(np.isfinite(grad)))
                fd = finite_difference_gradient(target.potential, x)
                worst = max(
                    worst, np.linalg.norm(grad - fd) / (1.0 + np.linalg.norm(grad))
                )
        elapsed = time.perf_counter() - start
        report(
            4,
            "Gradient correctness",
            worst < 1e-5 and finite and elapsed < 1.0,
            f"worst relative error {worst:.2e}, all finite at r=30, in {elapsed:.2f}s",
        )


class TestCriterion05RejectionSampler:
    def test_quadratic_start_moments_and_envelope(self):
        start = time.perf_counter()
        beta, d = 10.0, 2
        lam0 = beta * d
        target = QuadraticTarget(precision=beta, dim=d)
        # any acceptance probability above 1 + 1e-9 raises inside the sampler
        draws, trials = sample_pi0_batch(target, 1.0, lam0, rng_stream(505), 100_000)
        v = 1.0 / (lam0 + beta)
        n = draws.shape[0]
        mean_ok = bool(np.all(np.abs(draws.mean(axis=0)) < 3.0 * np.sqrt(v / n)))
        cov = np.cov(draws.T)
        diag_ok = bool(np.all(np.abs(np.diag(cov) - v) < 3.0 * v * np.sqrt(2.0 / n)))
        off_ok = abs(cov[0, 1]) < 3.0 * v / np.sqrt(n)
        elapsed = time.perf_counter() - start
        report(
            5,
            "Rejection sampler",
            mean_ok and diag_ok and off_ok and elapsed < 30.0,
            f"mean {draws.mean(axis=0).round(5)}, cov diag {np.diag(cov).round(6)} "
            f"(target {v:.6f}), {trials} trials for {n} draws, in {elapsed:.1f}s",
        )


class TestCriterion06KlCalibration:
    def test_shifted_gaussian(self):
        start = time.perf_counter()
        estimates = []
        for seed in range(20):
            rng = np.random.default_rng(606 + seed)
            p = rng.standard_normal((1000, 2))
            q = rng.standard_normal((1000, 2)) + np.array([1.0, 0.0])
            estimates.append(knn_kl(p, q, k=3))
        median = float(np.median(estimates))
        elapsed = time.perf_counter() - start
        report(
            6,
            "KL estimator calibration",
            abs(median - 0.5) < 0.1 and elapsed < 10.0,
            f"median {median:.4f} vs true 0.5, in {elapsed:.1f}s",
        )


class TestCriterion07ActionOracles:
    def test_bounds_and_oracles(self):
        start = time.perf_counter()
        closed = mog_action_bound(10.0, 2.0, 2, 5.0)
        quad = mog_action_bound(10.0, 2.0, 2, 5.0, method="quadrature")
        part_a = abs(closed.value - quad.value) < 1e-8

        beta, S, d = 2.0, 1.0, 2
        gaussian = GaussianMixtureTarget(
            weights=[1.0], means=[[0.0, 0.0]], precision=beta
        )
        est = heat_curve_action(
            gaussian, S, mc_samples=10_000, quad_points=64, rng=rng_stream(707)
        )
        exact = (S * d / 2.0) * np.log(1.0 + 2.0 * S * beta)
        part_b = abs(est.value - exact) <= 3.0 * est.error_estimate

        w2 = gaussian_w2(np.zeros(d), 1 / beta, np.zeros(d), 1 / beta + 2 * S)
        part_c = est.value >= w2**2 - 3.0 * est.error_estimate
        elapsed = time.perf_counter() - start
        report(
            7,
            "Action oracles",
            part_a and part_b and part_c and elapsed < 60.0,
            f"closed-quad diff {abs(closed.value - quad.value):.2e}; heat estimate "
            f"{est.value:.4f} +/- {est.error_estimate:.4f} vs exact {exact:.4f}; "
            f"W2^2 {w2**2:.4f}; in {elapsed:.1f}s",
        )


class TestCriterion08DeskScaleReproduction:
    def test_reference_budgets_reach_threshold(self):
        start = time.perf_counter()
        config = ExperimentConfig(
            r_values=[2.0, 5.0, 10.0],
            m_grids={2.0: [200], 5.0: [500], 10.0: [2500]},
            seeds=(0, 1, 2, 3, 4),
            n_chains=1000,
        )
        records = run_sweep(config, master_seed=808)
        details = []
        ok = True
        for r in config.r_values:
            cells = [rec for rec in records if rec.r == r]
            median = float(np.median([rec.kl_clamped for rec in cells]))
            covered = sum(rec.mode_coverage == 6 for rec in cells)
            # probability >= 0.95 over 5 seeds means every seed
            ok &= median < 0.2 and covered == len(cells)
            details.append(f"r={r}: median KL {median:.3f}, coverage 6 in {covered}/5")
        elapsed = time.perf_counter() - start
        report(8, "Desk-scale reproduction", ok, "; ".join(details) + f"; {elapsed:.0f}s")


@pytest.mark.slow
class TestCriterion09PolynomialScaling:
    def test_loglog_slope_of_grid_searched_budgets(self):
        """Known-red: the grid search saturates, slope 1.90 < 2.0.

        Measured transition-resolving scans put the true iteration
        requirement near {4, 6, 8, 8} for r in {2, 5, 10, 15}: with this
        annealing family the start distribution is already six-modal with
        symmetric weights, so output quality is nearly budget-independent
        and the prescribed grids bottom out.  See notes/decisions.md.
        """
        start = time.perf_counter()
        r_values = [2.0, 5.0, 10.0, 15.0]
        config = ExperimentConfig(
            r_values=r_values,
            m_grids={r: default_m_grid(r) for r in r_values},
            thresholds=(0.2,),
            seeds=(0, 1, 2, 3, 4),
            n_chains=1000,
        )
        records = run_sweep(config, master_seed=909)
        points = []
        for r in r_values:
            m_star = iterations_to_threshold(records, r, 0.2)
            assert m_star is not None, f"threshold never reached for r={r}"
            points.append((r, m_star))
        fit = loglog_fit(points)
        elapsed = time.perf_counter() - start
        report(
            9,
            "Polynomial scaling",
            2.0 <= fit.slope <= 3.7 and fit.r_squared > 0.9,
            f"points {points}, slope {fit.slope:.3f} (window [2.0, 3.7]), "
            f"R^2 {fit.r_squared:.3f}, in {elapsed:.0f}s",
        )


class TestCriterion10BaselineFailure:
    def test_plain_chains_stay_confined_while_annealed_cover(self):
        start = time.perf_counter()
        target = ring_mixture(6, 10.0, 10.0)
        radius = 3.0 / np.sqrt(10.0)
        n_chains, budget, n_seeds = 1000, 2500, 20
        h = 0.02  # inside the annealed runs' step range

        lmc_confined = 0
        for seed in range(n_seeds):
            rng = rng_stream(1010, seed)
            inits = target.means[0] + rng.standard_normal((n_chains, 2)) / np.sqrt(10.0)
            finals = run_lmc_batch(target, h, budget, rng, inits)
            lmc_confined += mode_coverage(finals, target.means, radius) < 6

        grid_cfg = ExperimentConfig(
            r_values=[10.0], m_grids={10.0: [budget]}, seeds=tuple(range(n_seeds)),
            n_chains=n_chains,
        )
        records = run_sweep(grid_cfg, master_seed=1111)
        almc_covered = sum(rec.mode_coverage == 6 for rec in records)

        elapsed = time.perf_counter() - start
        ok = lmc_confined >= int(np.ceil(0.95 * n_seeds)) and almc_covered >= int(
            np.ceil(0.95 * n_seeds)
        )
        report(
            10,
            "Baseline failure",
            ok,
            f"plain chains missed modes in {lmc_confined}/{n_seeds} seeds; annealed "
            f"covered all 6 in {almc_covered}/{n_seeds}; {elapsed:.0f}s",
        )
