"""Where does radiation drag matter?

Relaxation times for a handful of environments, from the microwave background
to a 50 MeV beam in a fusion-grade radiation bath, followed by the electron
density below which the radiation drag damps plasma oscillations, and the
efficiency of inverse-Compton energy transfer.
"""

import math

from lightpressure.kinetics import relaxation_rate_hot, relaxation_rate_thompson
from lightpressure.quantities import CONSTANTS
from lightpressure.scenarios import critical_density, ics_max_energy, scenario_table

print(f"{'scenario':<18} {'T [K]':>10} {'K_C':>9} {'t_rlx [s]':>11} {'N_cr [cm^-3]':>13}  formula")
for r in scenario_table():
    print(f"{r.name:<18} {r.T_kelvin:10.3g} {r.K_C:9.3g} {r.t_rlx_seconds:11.3g} {r.N_cr_cm3:13.3g}  {r.rate_formula}")

cmb = next(r for r in scenario_table() if r.name == "cmb_today")
print(f"\nThe background would need {cmb.t_rlx_seconds / CONSTANTS.t_universe:.0f} ages of the universe to thermalise electrons.")

hot = critical_density(relaxation_rate_hot(1.7, 1.7).tau_rlx)
cold = critical_density(relaxation_rate_thompson(1e9 / CONSTANTS.kelvin_per_theta).tau_rlx)
print(f"Plasma oscillations are damped below {hot.n_cr:.2g} cm^-3 at theta = 1.7 and below {cold.n_cr:.2g} cm^-3 at 1e9 K.")

print("\nInverse Compton: largest scattered photon energy as a fraction of the electron energy")
eps = 2.5e-4
for gamma in (1.0, 10.0, 1e3, 1e5, 1e7):
    ev = ics_max_energy(eps, math.sqrt(gamma**2 - 1.0))
    print(f"  gamma = {gamma:<8g} 4 gamma eps = {4 * gamma * eps:<9.3g} eta = {ev.eta:.5f}")
