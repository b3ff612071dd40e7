"""Derived headline quantities: plasma damping, inverse-Compton limits, worked examples."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

from .kinetics import (
    RelaxationReport,
    relaxation_rate,
    relaxation_rate_hot,
    trajectory_time_scale,
)
from .quantities import CONSTANTS, Q_FIT, ElectronKinematics, as_kinematics

__all__ = [
    "PlasmaAssessment",
    "ICSEvent",
    "ScenarioRecord",
    "N_CR_COEFFICIENT",
    "critical_density",
    "critical_density_coefficient",
    "ics_max_energy",
    "scenario_table",
    "scenarios_to_csv",
    "scenarios_to_json",
    "SCENARIO_FIELDS",
]

#: rounded value of (m0 / pi e^2) / t_C^2 in cm^-3
N_CR_COEFFICIENT = 1.2e26


@dataclass(frozen=True)
class PlasmaAssessment:
    n_cr: float
    tau_rlx: float
    omega_dmp: float
    damped: Optional[bool] = None
    n_e: Optional[float] = None


@dataclass(frozen=True)
class ICSEvent:
    eps_in: float
    kin: ElectronKinematics
    eps_sc_max: float
    eta: float


def critical_density_coefficient() -> float:
    """``(m0 / pi e^2) / t_C^2`` in cm^-3: the critical density at tau_rlx = 1."""
    c = CONSTANTS
    return c.m_e / (math.pi * c.e**2) / c.tC**2


def critical_density(tau_rlx: float, n_e: Optional[float] = None, threshold: float = 0.1) -> PlasmaAssessment:
    """Electron density below which radiative damping beats plasma oscillation.

    ``N_cr = (m0 / pi e^2) / (t_C tau_rlx)^2``. If ``n_e`` is given the
    oscillations count as damped when ``n_e < threshold * N_cr``.
    """
    if not tau_rlx > 0.0:
        raise ValueError("tau_rlx must be positive")
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must lie in (0, 1]")
    n_cr = critical_density_coefficient() / tau_rlx**2
    damped = None if n_e is None else bool(n_e < threshold * n_cr)
    return PlasmaAssessment(n_cr, tau_rlx, 1.0 / (CONSTANTS.tC * tau_rlx), damped, n_e)


def ics_max_energy(eps_in: float, kin) -> ICSEvent:
    """Largest photon energy after one head-on scattering, and ``eta = eps_sc / gamma``.

    ``eps_sc = eps_in (gamma + mu) / (gamma - mu + 2 eps_in)``, with
    ``gamma - mu`` taken as ``1 / (gamma + mu)``.
    """
    if not eps_in > 0.0:
        raise ValueError("eps_in must be positive")
    kin = as_kinematics(kin)
    gpm = kin.gamma + kin.mu
    # grouped so that at rest this is eps_in * R(eps_in, pi) to the last bit
    eps_sc = eps_in * (gpm * (1.0 / (1.0 / gpm + 2.0 * eps_in)))
    return ICSEvent(eps_in, kin, eps_sc, eps_sc / kin.gamma)


# ---------------------------------------------------------------------------


SCENARIO_FIELDS = (
    "name",
    "T_kelvin",
    "theta",
    "gamma_in",
    "K_C",
    "tau_rlx",
    "t_rlx_seconds",
    "rate_formula",
    "N_cr_cm3",
)


@dataclass(frozen=True)
class ScenarioRecord:
    name: str
    T_kelvin: float
    theta: float
    gamma_in: float
    K_C: float
    tau_rlx: float
    t_rlx_seconds: float
    rate_formula: str
    N_cr_cm3: float
    regime: str

    def as_row(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in SCENARIO_FIELDS}


def _record(name: str, report: RelaxationReport) -> ScenarioRecord:
    theta = report.theta_eq
    return ScenarioRecord(
        name=name,
        T_kelvin=theta * CONSTANTS.kelvin_per_theta,
        theta=theta,
        gamma_in=report.gamma_in,
        K_C=Q_FIT * theta * report.gamma_in,
        tau_rlx=report.tau_rlx,
        t_rlx_seconds=report.t_rlx_seconds,
        rate_formula=report.formula,
        N_cr_cm3=critical_density(report.tau_rlx).n_cr,
        regime=report.regime,
    )


FUSION_THETA = 1.7
BEAM_ENERGY_EV = 50e6


def scenario_table() -> list[ScenarioRecord]:
    """The six reference cases, each tagged with the rate estimate used.

    * ``cmb_today``: Thomson slowing scale ``1 / theta^4`` at the CMB temperature;
    * ``lab_1300K``: log-rate estimate at a laboratory furnace temperature;
    * ``compton_threshold``: log-rate estimate at theta = 0.1 (K_C = 1);
    * ``fusion_1e10K``: hot-start estimate at theta = 1.7 near equilibrium;
    * ``thompson_1e8K``: Thomson slowing scale at 1e8 K;
    * ``beam_50MeV``: log-rate estimate for a 50 MeV electron in the fusion bath.
    """
    c = CONSTANTS
    rows = [
        _record("cmb_today", trajectory_time_scale(c.theta_cmb)),
        _record("lab_1300K", relaxation_rate(1300.0 / c.kelvin_per_theta, 1.0)),
        _record("compton_threshold", relaxation_rate(0.1, 1.0)),
        _record("fusion_1e10K", relaxation_rate_hot(FUSION_THETA, FUSION_THETA)),
        _record("thompson_1e8K", trajectory_time_scale(1e8 / c.kelvin_per_theta)),
        _record("beam_50MeV", relaxation_rate(FUSION_THETA, BEAM_ENERGY_EV / c.rest_energy_ev)),
    ]
    return rows


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def scenarios_to_csv(rows: Optional[list[ScenarioRecord]] = None) -> str:
    rows = scenario_table() if rows is None else rows
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SCENARIO_FIELDS)
    for r in rows:
        writer.writerow([_fmt(v) for v in r.as_row().values()])
    return out.getvalue()


def scenarios_to_json(rows: Optional[list[ScenarioRecord]] = None) -> str:
    rows = scenario_table() if rows is None else rows
    payload = [{k: (float(_fmt(v)) if isinstance(v, float) else v) for k, v in r.as_row().items()} for r in rows]
    return json.dumps(payload, indent=2) + "\n"

