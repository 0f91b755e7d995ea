"""Targets and annealing schedules: potentials, bounds, grids, coefficients.

Walks through the building blocks: a ring of Gaussian modes with its
potential/gradient/smoothness oracles, the power-law annealing schedule,
the quadratic step-size grid, and the three coefficients that define one
exponential-integrator step.
"""

import numpy as np

from almc import (
    AnnealingSchedule,
    grid_from_quadratic_steps,
    lambda_integral,
    plan_parameters,
    ring_mixture,
    step_coefficients,
)

print("=" * 70)
print("1. A ring of six Gaussian modes")
print("=" * 70)
target = ring_mixture(num_modes=6, r=2.0, precision=10.0)
print(f"dimension {target.dim}, components {target.num_components}, "
      f"radius {target.radius}")
x = np.array([2.0, 0.0])
print(f"potential at mode center {x}: {target.potential(x):.6f} (= log 6 - tiny)")
print(f"gradient there: {target.grad_potential(x).round(8)}")
print(f"two-sided smoothness bound: {target.smoothness_bound():.1f}")
lo, hi = target.hessian_eigenvalue_bounds()
print(f"pairwise-spread Hessian sandwich: [{lo:.1f}, {hi:.1f}]")

print()
print("=" * 70)
print("2. The annealing schedule and its integrals")
print("=" * 70)
schedule = AnnealingSchedule.power(lambda0=5.0, gamma=10.0)
schedule.validate()
print("lambda(theta) = 5 (1-theta)^10, eta == 1")
print(f"integral of lambda over [0, 1]: {lambda_integral(schedule, 0.0, 1.0):.12f} "
      f"(= 5/11)")

print()
print("=" * 70)
print("3. Quadratic step-size grid")
print("=" * 70)
grid = grid_from_quadratic_steps(num_steps=200, s_min=0.01, s_max=0.05)
print(f"M = {grid.num_steps}, total diffusion time T = {grid.total_time:.4f}")
print(f"first/mid/last step times: {grid.step_times[0]:.4f} "
      f"{grid.step_times[100]:.4f} {grid.step_times[-1]:.4f}")

print()
print("=" * 70)
print("4. Step coefficients (decay, drift gain, noise scale)")
print("=" * 70)
for a, b in [(0.0, 0.01), (0.5, 0.51), (0.98, 1.0)]:
    c = step_coefficients(schedule, grid.total_time, a, b)
    print(f"interval [{a:.2f}, {b:.2f}]: decay {c.lam0:.6f}, "
          f"drift {c.drift_weight:.6f}, noise {c.noise_scale:.6f}")
print("with lambda == 0 these reduce to the plain Langevin (1, h, sqrt(2h)):")
lmc = step_coefficients(AnnealingSchedule.lmc(), 1.0, 0.0, 0.01)
print(f"  ({lmc.lam0}, {lmc.drift_weight}, {lmc.noise_scale:.6f})")

print()
print("=" * 70)
print("5. Advisory run-length planning from an action value")
print("=" * 70)
T, M = plan_parameters(action=1.0, epsilon=0.5, dim=2, beta=10.0)
print(f"action 1.0 at accuracy 0.5: T = {T}, M = {M} (constants set to 1; "
      "experiments tune M empirically)")
