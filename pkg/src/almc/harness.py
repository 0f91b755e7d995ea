"""Scaling experiment: iterations needed vs. mode radius on ring mixtures.

For each mode radius r the sweep runs annealed chains at several iteration
budgets M, estimates the divergence from exact target samples to the chain
outputs with the k-NN estimator, and finds the smallest M whose median
divergence over seeds drops below each threshold.  A log-log regression of
that M* against r quantifies the polynomial scaling.

Everything is driven by one master seed: each (r, M, seed) cell derives its
generator from the seed-sequence spawn key (r-index, M-index, seed-index),
so cells are independent jobs and the sweep is reproducible row for row.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .metrics import knn_kl, mode_coverage
from .samplers import run_almc_batch
from .schedule import AnnealingSchedule, coefficients_for_grid, grid_from_quadratic_steps
from .targets import ring_mixture

# Iteration budgets that hit the 0.2 divergence threshold for the standard
# 6-mode, precision-10 ring family, per radius.  Grid searches scan a
# geometric neighborhood of these.
REFERENCE_M = {2: 200, 5: 500, 10: 2500, 15: 10000, 20: 20000, 25: 40000, 30: 60000}
GRID_FACTORS = (0.5, 0.75, 1.0, 1.5, 2.0)


def default_m_grid(r: float, factors: tuple[float, ...] = GRID_FACTORS) -> list[int]:
    """Geometric grid of iteration budgets around the reference value for r."""
    if r not in REFERENCE_M:
        raise ValueError(f"no reference budget for r = {r}; supply a grid explicitly")
    base = REFERENCE_M[r]
    return sorted({max(1, int(round(base * f))) for f in factors})


@dataclass
class ExperimentConfig:
    """Sweep settings; defaults reproduce the desk-scale ring experiment."""

    r_values: list[float]
    m_grids: dict[float, list[int]]
    beta: float = 10.0
    num_modes: int = 6
    thresholds: tuple[float, ...] = (0.2, 0.1)
    s_min: float = 0.01
    s_max: float = 0.05
    n_chains: int = 1000
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    k_nn: int = 3
    lambda0: float = 5.0
    gamma: float = 10.0
    coverage_radius: float | None = None

    def __post_init__(self):
        if not self.r_values:
            raise ValueError("r_values must be nonempty")
        thr = tuple(self.thresholds)
        if any(t <= 0 for t in thr):
            raise ValueError("thresholds must be positive")
        if list(thr) != sorted(set(thr), reverse=True):
            raise ValueError("thresholds must be strictly decreasing")
        self.thresholds = thr
        for r in self.r_values:
            grid = self.m_grids.get(r)
            if not grid:
                raise ValueError(f"missing M grid for r = {r}")
            if list(grid) != sorted(set(grid)):
                raise ValueError(f"M grid for r = {r} must be strictly increasing")
        if self.n_chains < 2 * (self.k_nn + 1):
            raise ValueError("n_chains must be at least 2 * (k_nn + 1)")
        if self.coverage_radius is None:
            self.coverage_radius = 3.0 / math.sqrt(self.beta)

    def schedule(self) -> AnnealingSchedule:
        return AnnealingSchedule.power(self.lambda0, self.gamma, eta_value=1.0)

    @classmethod
    def desk_scale(cls, r_values=(2.0, 5.0, 10.0), factors=GRID_FACTORS, **overrides):
        grids = {r: default_m_grid(r, factors) for r in r_values}
        return cls(r_values=list(r_values), m_grids=grids, **overrides)

    @classmethod
    def from_json(cls, document: str | dict) -> "ExperimentConfig":
        spec = json.loads(document) if isinstance(document, str) else dict(document)
        r_values = [float(r) for r in spec.pop("r_values")]
        raw_grids = spec.pop("m_grids", None)
        if raw_grids is None:
            grids = {r: default_m_grid(r) for r in r_values}
        else:
            grids = {float(r): [int(m) for m in ms] for r, ms in raw_grids.items()}
        if "thresholds" in spec:
            spec["thresholds"] = tuple(spec["thresholds"])
        if "seeds" in spec:
            spec["seeds"] = tuple(spec["seeds"])
        return cls(r_values=r_values, m_grids=grids, **spec)


@dataclass(frozen=True)
class ExperimentRecord:
    """One (r, M, seed) cell of the sweep."""

    r: float
    M: int
    seed: int
    kl_raw: float
    mode_coverage: int
    oracle_calls: int
    wall_ms: float
    error: str = ""

    @property
    def kl_clamped(self) -> float:
        return max(self.kl_raw, 0.0)

    @property
    def failed(self) -> bool:
        return bool(self.error)


CSV_HEADER = "r,M,seed,kl_raw,kl_clamped,mode_coverage,oracle_calls,wall_ms"


def write_records_csv(records: list[ExperimentRecord], path) -> None:
    lines = [CSV_HEADER]
    for rec in records:
        lines.append(
            f"{float(rec.r)!r},{rec.M},{rec.seed},{float(rec.kl_raw)!r},"
            f"{float(rec.kl_clamped)!r},{rec.mode_coverage},{rec.oracle_calls},"
            f"{rec.wall_ms:.3f}"
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_records_csv(path) -> list[ExperimentRecord]:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected records header: {header!r}")
        records = []
        for line in fh:
            r, M, seed, kl_raw, _kl_clamped, cov, calls, wall = line.strip().split(",")
            records.append(
                ExperimentRecord(
                    r=float(r),
                    M=int(M),
                    seed=int(seed),
                    kl_raw=float(kl_raw),
                    mode_coverage=int(cov),
                    oracle_calls=int(calls),
                    wall_ms=float(wall),
                )
            )
    return records


def run_cell(
    config: ExperimentConfig,
    r: float,
    M: int,
    seed: int,
    master_seed: int,
    cell_key: tuple[int, int, int],
    coefficients=None,
) -> ExperimentRecord:
    """Run one (r, M, seed) cell: chains, exact reference draws, divergence."""
    start = time.perf_counter()
    target = ring_mixture(config.num_modes, r, config.beta)
    schedule = config.schedule()
    grid = grid_from_quadratic_steps(M, config.s_min, config.s_max)
    if coefficients is None:
        coefficients = coefficients_for_grid(schedule, grid)

    root = np.random.SeedSequence(master_seed, spawn_key=cell_key)
    rng_init, rng_chain, rng_ref = (np.random.default_rng(s) for s in root.spawn(3))

    # eta(0) = 1, so the start density is the tilted mixture in closed form.
    start_mixture = target.tilted(config.lambda0)
    inits = start_mixture.sample(config.n_chains, rng_init)
    finals = run_almc_batch(
        target, schedule, grid, rng_chain, inits, coefficients=coefficients
    )
    reference = target.sample(config.n_chains, rng_ref)

    # Divergence from the target distribution to the sampled distribution.
    kl = knn_kl(reference, finals, k=config.k_nn)
    coverage = mode_coverage(finals, target.means, config.coverage_radius)
    wall_ms = (time.perf_counter() - start) * 1e3
    return ExperimentRecord(
        r=r,
        M=M,
        seed=seed,
        kl_raw=kl,
        mode_coverage=coverage,
        oracle_calls=M * config.n_chains,
        wall_ms=wall_ms,
    )


def run_sweep(config: ExperimentConfig, master_seed: int = 0) -> list[ExperimentRecord]:
    """Run every (r, M, seed) cell; failures abort only their own cell."""
    records: list[ExperimentRecord] = []
    coeff_cache: dict[int, list] = {}
    schedule = config.schedule()
    for i, r in enumerate(config.r_values):
        for j, M in enumerate(config.m_grids[r]):
            if M not in coeff_cache:
                grid = grid_from_quadratic_steps(M, config.s_min, config.s_max)
                coeff_cache[M] = coefficients_for_grid(schedule, grid)
            for s_idx, seed in enumerate(config.seeds):
                try:
                    records.append(
                        run_cell(
                            config,
                            r,
                            M,
                            seed,
                            master_seed,
                            cell_key=(i, j, s_idx),
                            coefficients=coeff_cache[M],
                        )
                    )
                except Exception as err:  # cell-level failure, keep sweeping
                    records.append(
                        ExperimentRecord(
                            r=r,
                            M=M,
                            seed=seed,
                            kl_raw=float("nan"),
                            mode_coverage=0,
                            oracle_calls=0,
                            wall_ms=0.0,
                            error=f"{type(err).__name__}: {err}",
                        )
                    )
    return records


def iterations_to_threshold(
    records: list[ExperimentRecord], r: float, threshold: float
) -> int | None:
    """Smallest M whose median clamped divergence over seeds beats ``threshold``.

    Returns None when no budget in the grid reaches it.
    """
    by_m: dict[int, list[float]] = {}
    for rec in records:
        if rec.r == r and not rec.failed:
            by_m.setdefault(rec.M, []).append(rec.kl_clamped)
    if not by_m:
        raise ValueError(f"no records for r = {r}")
    for M in sorted(by_m):
        if float(np.median(by_m[M])) < threshold:
            return M
    return None


@dataclass(frozen=True)
class FitResult:
    """Ordinary least squares on log10-log10 axes."""

    slope: float
    intercept: float
    r_squared: float


def loglog_fit(points: list[tuple[float, float]]) -> FitResult:
    """OLS fit of log10(M*) against log10(r)."""
    if len(points) < 2:
        raise ValueError("need at least two points to fit")
    arr = np.asarray(points, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("all coordinates must be positive for a log-log fit")
    x = np.log10(arr[:, 0])
    y = np.log10(arr[:, 1])
    slope, intercept = np.polyfit(x, y, deg=1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return FitResult(slope=float(slope), intercept=float(intercept), r_squared=r_squared)


def threshold_fits(
    records: list[ExperimentRecord], config: ExperimentConfig
) -> dict[float, dict]:
    """Per-threshold (r, M*) points and their log-log fit.

    Radii that never reach a threshold are listed under "not_reached" and
    excluded from that threshold's fit.
    """
    out: dict[float, dict] = {}
    for threshold in config.thresholds:
        points = []
        not_reached = []
        for r in config.r_values:
            m_star = iterations_to_threshold(records, r, threshold)
            if m_star is None:
                not_reached.append(r)
            else:
                points.append((r, m_star))
        entry: dict = {"points": points, "not_reached": not_reached}
        if len(points) >= 2:
            fit = loglog_fit(points)
            entry["fit"] = fit
        out[threshold] = entry
    return out


def write_fit_json(path, fits: dict[float, dict], master_seed: int) -> None:
    payload = {
        "seed": master_seed,
        "aggregation": "median over seeds of the clamped divergence",
        "fits": [],
    }
    for threshold, entry in fits.items():
        item = {
            "threshold": threshold,
            "points": [[r, m] for r, m in entry["points"]],
            "not_reached": entry["not_reached"],
        }
        if "fit" in entry:
            fit = entry["fit"]
            item.update(
                slope=fit.slope, intercept=fit.intercept, r_squared=fit.r_squared
            )
        payload["fits"].append(item)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
