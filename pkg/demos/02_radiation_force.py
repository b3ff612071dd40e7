"""Drag on an electron moving through blackbody radiation.

For slow electrons in a cold bath the drag grows like gamma times the Thomson
value. Once the photons look energetic in the electron frame (K_C = q theta
gamma of order one), Klein-Nishina suppression kicks in and the enhancement
factor Q only grows logarithmically. We print Q(mu) for the microwave
background, a 6 MK bath and an ultra-hot bath, and compare the exact reduced
integral with the one-line analytic model.
"""

import numpy as np

from lightpressure.force import force_blackbody, force_model, force_variants, theta_factor
from lightpressure.quantities import CONSTANTS

for theta, label in ((CONSTANTS.theta_cmb, "microwave background"), (1e-3, "theta = 1e-3"), (1e6, "theta = 1e6")):
    print(f"\n{label}  (theta = {theta:g})")
    print(f"{'mu':>10} {'K_C':>10} {'Q exact':>12} {'Q model':>12} {'gamma':>10}")
    for mu in np.geomspace(1.0, 1e12, 7):
        exact = force_blackbody(mu, theta)
        model = force_model(mu, theta)
        gamma = np.hypot(1.0, mu)
        print(f"{mu:10.3g} {10 * theta * gamma:10.3g} {exact.q_factor:12.5g} {model.q_factor:12.5g} {gamma:10.3g}")

print("\nLow-velocity factor Theta(theta): drag divided by its Thomson value as mu -> 0")
for theta in (1e-4, 1e-2, 0.1, 1.0, 10.0, 100.0):
    print(f"  theta = {theta:<7g} Theta = {theta_factor(theta):.5f}")

print("\nThree curves near K_C ~ 1 (mu = 10, theta = 0.01):")
for name, ev in force_variants(10.0, 0.01).items():
    print(f"  {name:>5}: Q = {ev.q_factor:.5f}")
