"""A mono-energetic beam slows down without spreading.

With diffusion switched off, each electron follows its own deterministic
trajectory. A narrow pulse at mu = 100 in a theta = 1 bath drifts to lower
momentum and gets compressed, because faster electrons lose momentum faster.
The exact solution along characteristics is compared with the finite-volume
advection scheme on the same grid.
"""

import math

import numpy as np

from lightpressure.kinetics import CharacteristicsSolution, DistributionGrid, fp_evolve, gaussian_pulse, model_drag

theta, mu0, width = 1.0, 100.0, 10.0
pulse = lambda m: gaussian_pulse(m, mu0, width)  # noqa: E731
table = CharacteristicsSolution(pulse, model_drag, theta, 0.0, 1e-2, 1e3)
tau_e = float(table.xi(np.array([mu0 / math.e]))[0] - table.xi(np.array([mu0]))[0])
print(f"time for the pulse centre to drop by a factor e: tau = {tau_e:.4f}\n")

grid = DistributionGrid.linear(1.0, 200.0, 2000, pulse)
print(f"{'tau':>8} {'centre':>9} {'width':>8} {'L1 (PDE vs exact)':>18}")
for frac in (0.25, 0.5, 1.0):
    tau = frac * tau_e
    pde = fp_evolve(grid, theta, model_drag, tau, diffusion=False)
    exact = CharacteristicsSolution(pulse, model_drag, theta, tau, 0.5, 300.0, beyond="zero")(grid.centers)
    w = exact * grid.widths
    centre = float(np.sum(w * grid.centers) / np.sum(w))
    spread = float(np.sqrt(np.sum(w * (grid.centers - centre) ** 2) / np.sum(w)))
    l1 = float(np.sum(np.abs(pde.density - exact) * grid.widths) / np.sum(w))
    print(f"{tau:8.4f} {centre:9.3f} {spread:8.3f} {l1:18.2e}")
print("\nThe width shrinks as the pulse slows: a narrow line forms without any thermal spreading.")
