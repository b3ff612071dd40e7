"""An electron population cools toward the radiation temperature.

A Maxwellian at twice the bath temperature is evolved with the drag-diffusion
Fokker-Planck solver. The distribution stays close to a Maxwellian throughout,
so one effective temperature describes it, and that temperature relaxes
exponentially on the Thomson time scale. Particle number is conserved to
rounding error.
"""

import math

import numpy as np

from lightpressure.kinetics import (
    DistributionGrid,
    fit_effective_temperature,
    fp_snapshots,
    mb_density,
    relaxation_rate_thompson,
    thompson_drag,
)

theta_eq, theta_in = 1e-2, 2e-2
grid = DistributionGrid.default_for(math.sqrt(2 * theta_in), lambda m: mb_density(m, theta_in))
tau_rlx = relaxation_rate_thompson(theta_eq).tau_rlx
times = np.linspace(0.25, 3.0, 12) * tau_rlx
snaps = fp_snapshots(grid, theta_eq, thompson_drag, times)

print(f"bath theta = {theta_eq}, start theta = {theta_in}, predicted tau_rlx = {tau_rlx:.4g}\n")
print(f"{'tau/tau_rlx':>12} {'theta_eff':>10} {'predicted':>10} {'fit resid':>10} {'N drift':>10}")
for t, s in zip(times, snaps):
    fit = fit_effective_temperature(s)
    pred = theta_eq + (theta_in - theta_eq) * math.exp(-t / tau_rlx)
    print(f"{t / tau_rlx:12.3f} {fit.theta:10.6f} {pred:10.6f} {fit.residual:10.2e} {s.total / grid.total - 1:10.1e}")
