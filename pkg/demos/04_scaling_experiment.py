"""A small end-to-end scaling sweep: records, threshold search, fit, files.

Runs a reduced version of the radius-scaling experiment (fewer seeds and
budgets than the acceptance suite), finds the iteration requirement per
radius at the 0.2 divergence threshold, fits the log-log regression, and
writes the records CSV and fit JSON that the figure renderer consumes.

The full-scale protocol is available through the command line:

    almc experiment --config exp.json --out records.csv --fit fit.json --seed 0
    render_scaling_figure --records records.csv --fit fit.json --out figure.png
"""

import numpy as np

from almc import ExperimentConfig, iterations_to_threshold, run_sweep
from almc.harness import threshold_fits, write_fit_json, write_records_csv

config = ExperimentConfig(
    r_values=[2.0, 5.0, 10.0],
    m_grids={2.0: [4, 8, 16, 50, 100], 5.0: [4, 8, 16, 50, 100], 10.0: [8, 16, 50, 100, 200]},
    thresholds=(0.2, 0.1),
    seeds=(0, 1, 2),
    n_chains=1000,
)

print("=" * 70)
print("1. Sweep over (radius, budget, seed) cells")
print("=" * 70)
records = run_sweep(config, master_seed=0)
print(f"{len(records)} cells "
      f"({sum(rec.failed for rec in records)} failed)")
for r in config.r_values:
    per_m = {}
    for rec in records:
        if rec.r == r:
            per_m.setdefault(rec.M, []).append(rec.kl_clamped)
    medians = {m: float(np.median(v)) for m, v in sorted(per_m.items())}
    print(f"r = {r}: median divergence by budget "
          + "  ".join(f"{m}:{v:.3f}" for m, v in medians.items()))

print()
print("=" * 70)
print("2. Iteration requirement per radius and the log-log fit")
print("=" * 70)
for threshold in config.thresholds:
    stars = {r: iterations_to_threshold(records, r, threshold) for r in config.r_values}
    print(f"threshold {threshold}: requirement per radius {stars}")
fits = threshold_fits(records, config)
for threshold, entry in fits.items():
    if "fit" in entry:
        fit = entry["fit"]
        print(f"threshold {threshold}: slope {fit.slope:.3f}, "
              f"intercept {fit.intercept:.3f}, R^2 {fit.r_squared:.3f}")

print()
print("=" * 70)
print("3. Machine-readable outputs")
print("=" * 70)
write_records_csv(records, "records.csv")
write_fit_json("fit.json", fits, master_seed=0)
print("wrote records.csv and fit.json")
print("render with: render_scaling_figure --records records.csv "
      "--fit fit.json --out figure.png")
