"""Radiation pressure on electrons in isotropic photon baths, from Thomson to Klein-Nishina."""

__version__ = "0.1.0"

from .force import (
    ConvergenceError,
    ForceEvaluation,
    TrajectoryPoint,
    force_blackbody,
    force_general,
    force_general_alt,
    force_model,
    force_thompson,
    force_variants,
    theta_factor,
    thompson_trajectory,
)
from .kinetics import (
    CharacteristicsSolution,
    DistributionGrid,
    FokkerPlanckSolver,
    RelaxationReport,
    characteristics_solve,
    fit_effective_temperature,
    fp_evolve,
    mb_density,
    mj_density,
    relaxation_rate,
)
from .numerics import QuadratureConfig, QuadratureResult, integrate_finite, integrate_semi_infinite
from .quantities import (
    CONSTANTS,
    ElectronKinematics,
    PlanckSpectrum,
    RadiationTemperature,
    TabulatedSpectrum,
    kinematics_from_mu,
)
from .scenarios import ICSEvent, PlasmaAssessment, critical_density, ics_max_energy, scenario_table
from .xsection import CrossSectionTriple, cross_sections, kn_total, sigma_mt, sigma_r

__all__ = [name for name in dir() if not name.startswith("_")]
