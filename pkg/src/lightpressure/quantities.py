"""Physical constants, electron kinematics, Doppler transform and photon spectra.

Everything downstream works in dimensionless variables:

* ``mu``    electron momentum in units of ``m0 c``
* ``theta`` radiation temperature ``kB T / m0 c^2``
* ``eps``   photon energy ``hbar omega / m0 c^2``
* ``tau``   time in units of the Compton time scale ``t_C``
* ``f``     force ``d mu / d tau``

Dimensional quantities (CGS, kelvin, eV) only appear at the edges.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "Q_FIT",
    "ElectronKinematics",
    "RadiationTemperature",
    "SpectrumModel",
    "PlanckSpectrum",
    "TabulatedSpectrum",
    "kinematics_from_mu",
    "as_kinematics",
    "doppler",
    "doppler_from_lab_angle",
    "rest_frame_cosine",
    "transformed_spectrum",
    "planck_density",
    "compton_factor",
]

ArrayLike = Union[float, np.ndarray]

#: fitting constant of the analytic force model and of the Compton factor
Q_FIT = 10.0


@dataclass(frozen=True)
class PhysicalConstants:
    """CGS constant table (9 significant digits, CODATA 2018 inputs).

    Only ``c, hbar, m_e, e, k_B, eV`` and the rest energy are inputs; every
    other entry is derived from them so that identities such as
    ``sigma0 = 8 pi r0^2 / 3`` hold to rounding.
    """

    c: float = 2.99792458e10  # cm / s
    hbar: float = 1.05457182e-27  # erg s
    m_e: float = 9.10938370e-28  # g
    e: float = 4.80320471e-10  # statC
    k_B: float = 1.380649e-16  # erg / K
    eV: float = 1.602176634e-12  # erg
    rest_energy_ev: float = 510998.95
    T_planck: float = 1.41678416e32  # K
    t_universe: float = 4.4e17  # s, value used for the CMB comparison
    theta_cmb: float = 0.534e-9  # quoted dimensionless CMB temperature

    @property
    def rest_energy(self) -> float:
        """m0 c^2 in erg."""
        return self.rest_energy_ev * self.eV

    @property
    def alpha(self) -> float:
        return self.e**2 / (self.hbar * self.c)

    @property
    def r0(self) -> float:
        """Classical electron radius e^2 / m0 c^2 (cm)."""
        return self.e**2 / self.rest_energy

    @property
    def sigma0(self) -> float:
        """Thomson cross-section (cm^2)."""
        return 8.0 * math.pi / 3.0 * self.r0**2

    @property
    def lambdaC(self) -> float:
        """Compton wavelength 2 pi hbar / m0 c (cm)."""
        return 2.0 * math.pi * self.hbar * self.c / self.rest_energy

    @property
    def tC(self) -> float:
        """Compton time scale 135 lambda_C / (64 pi^4 alpha^2 c) in seconds."""
        return 135.0 * self.lambdaC / (64.0 * math.pi**4 * self.alpha**2 * self.c)

    @property
    def WC(self) -> float:
        """Compton energy density m0 c^2 / lambda_C^3 (erg / cm^3)."""
        return self.rest_energy / self.lambdaC**3

    @property
    def kelvin_per_theta(self) -> float:
        return self.rest_energy / self.k_B

    @property
    def omega_per_eps(self) -> float:
        """Angular frequency (rad/s) of a photon with eps = 1."""
        return self.rest_energy / self.hbar

    @property
    def muPlanck(self) -> float:
        """Momentum scale k_B T_Pl / m0 c^2 of the Planck temperature."""
        return self.T_planck / self.kelvin_per_theta

    @property
    def theta_universe(self) -> float:
        """(t_C / t_U)^(1/4), the temperature whose Thomson time equals t_U."""
        return (self.tC / self.t_universe) ** 0.25


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class ElectronKinematics:
    """Dimensionless momentum and the derived Lorentz factors.

    ``one_minus_beta`` is stored separately because forming ``1 - beta`` by
    subtraction loses every digit once gamma exceeds ~1e8.
    """

    mu: float
    gamma: float
    beta: float
    one_minus_beta: float

    @property
    def gamma_minus_mu(self) -> float:
        return 1.0 / (self.gamma + self.mu)


def kinematics_from_mu(mu: float) -> ElectronKinematics:
    mu = float(mu)
    if not math.isfinite(mu) or mu < 0.0:
        raise ValueError(f"momentum must be finite and non-negative, got {mu!r}")
    gamma = math.hypot(1.0, mu)
    return ElectronKinematics(
        mu=mu,
        gamma=gamma,
        beta=mu / gamma,
        one_minus_beta=1.0 / (gamma * (gamma + mu)),
    )


def as_kinematics(kin: Union[ElectronKinematics, float]) -> ElectronKinematics:
    if isinstance(kin, ElectronKinematics):
        return kin
    return kinematics_from_mu(kin)


@dataclass(frozen=True)
class RadiationTemperature:
    theta: float

    def __post_init__(self):
        if not (self.theta > 0.0 and math.isfinite(self.theta)):
            raise ValueError(f"temperature must be positive, got {self.theta!r}")

    @property
    def kelvin(self) -> float:
        return self.theta * CONSTANTS.kelvin_per_theta

    @classmethod
    def from_kelvin(cls, kelvin: float) -> "RadiationTemperature":
        return cls(kelvin / CONSTANTS.kelvin_per_theta)


def _theta_value(theta) -> float:
    if isinstance(theta, RadiationTemperature):
        return theta.theta
    theta = float(theta)
    if not (theta > 0.0 and math.isfinite(theta)):
        raise ValueError(f"temperature must be positive, got {theta!r}")
    return theta


# ---------------------------------------------------------------------------
# Doppler transform


def doppler(kin, xi_P: ArrayLike) -> ArrayLike:
    """Doppler coefficient ``D = omega_P / omega_L = 1 / (gamma (1 + beta cos xi_P))``.

    ``1 + beta cos xi`` is evaluated as ``(1 - beta) + 2 beta cos^2(xi/2)`` so
    that the head-on direction keeps full precision for gamma >> 1.
    """
    kin = as_kinematics(kin)
    xi_P = np.asarray(xi_P, dtype=float)
    if np.any((xi_P < 0.0) | (xi_P > math.pi)):
        raise ValueError("angle must lie in [0, pi]")
    denom = kin.one_minus_beta + 2.0 * kin.beta * np.cos(0.5 * xi_P) ** 2
    out = 1.0 / (kin.gamma * denom)
    return out if out.ndim else float(out)


def doppler_from_lab_angle(kin, xi_L: ArrayLike) -> ArrayLike:
    """Same coefficient expressed through the lab angle: ``gamma (1 - beta cos xi_L)``."""
    kin = as_kinematics(kin)
    xi_L = np.asarray(xi_L, dtype=float)
    out = kin.gamma * (kin.one_minus_beta + 2.0 * kin.beta * np.sin(0.5 * xi_L) ** 2)
    return out if out.ndim else float(out)


def rest_frame_cosine(kin, xi_L: ArrayLike) -> ArrayLike:
    """cos xi_P = (cos xi_L - beta) / (1 - beta cos xi_L)."""
    kin = as_kinematics(kin)
    xi_L = np.asarray(xi_L, dtype=float)
    denom = kin.one_minus_beta + 2.0 * kin.beta * np.sin(0.5 * xi_L) ** 2
    out = np.clip((np.cos(xi_L) - kin.beta) / denom, -1.0, 1.0)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Spectra


class SpectrumModel:
    """Isotropic lab-frame photon spectrum.

    Subclasses implement :meth:`photon_density`, the number of photons per
    ``lambda_C^3`` per unit ``eps``; :meth:`density` gives the same spectrum in
    physical units (photons per cm^3 per rad/s).
    """

    def photon_density(self, eps: ArrayLike) -> np.ndarray:
        raise NotImplementedError

    def eps_support(self) -> tuple[float, float]:
        """Energy window outside of which the spectrum is negligible or zero."""
        raise NotImplementedError

    def density(self, omega: ArrayLike) -> ArrayLike:
        omega = np.asarray(omega, dtype=float)
        scale = CONSTANTS.lambdaC**3 * CONSTANTS.omega_per_eps
        out = np.asarray(self.photon_density(omega / CONSTANTS.omega_per_eps)) / scale
        return out if out.ndim else float(out)

    def energy_density(self) -> float:
        """Dimensionless energy density, in units of W_C."""
        from .numerics import QuadratureConfig, integrate_finite

        lo, hi = self.eps_support()
        cfg = QuadratureConfig(rel_tol=1e-12)

        def integrand(t):
            eps = np.exp(t)
            return eps * eps * self.photon_density(eps)

        return integrate_finite(integrand, math.log(lo), math.log(hi), cfg).value


class PlanckSpectrum(SpectrumModel):
    #: support expressed in units of theta; the Planck tail beyond is < 1e-40
    SUPPORT = (1e-9, 130.0)

    def __init__(self, theta):
        self.theta = _theta_value(theta)

    def __repr__(self):
        return f"PlanckSpectrum(theta={self.theta!r})"

    def photon_density(self, eps):
        eps = np.asarray(eps, dtype=float)
        x = eps / self.theta
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = 8.0 * math.pi * eps * eps / np.expm1(x)
        out = np.where(x > 0.0, out, 0.0)
        return out if out.ndim else float(out)

    def eps_support(self):
        return self.SUPPORT[0] * self.theta, self.SUPPORT[1] * self.theta

    def energy_density(self) -> float:
        return 8.0 * math.pi**5 / 15.0 * self.theta**4


class TabulatedSpectrum(SpectrumModel):
    """Spectrum from samples ``(omega, rho)``; log-log interpolation, zero outside.

    Segments with a zero endpoint fall back to linear interpolation.
    """

    CSV_HEADER = ("omega_rad_per_s", "rho_per_cm3_per_rad_s")

    def __init__(self, omega, rho):
        omega = np.asarray(omega, dtype=float)
        rho = np.asarray(rho, dtype=float)
        if omega.ndim != 1 or omega.shape != rho.shape or omega.size < 2:
            raise ValueError("need two matching 1-D arrays with at least 2 samples")
        if np.any(omega <= 0.0) or np.any(np.diff(omega) <= 0.0):
            raise ValueError("frequencies must be positive and strictly increasing")
        if np.any(rho < 0.0) or not np.all(np.isfinite(rho)):
            raise ValueError("spectral density must be finite and non-negative")
        self.omega = omega
        self.rho = rho
        self._eps = omega / CONSTANTS.omega_per_eps
        self._n = rho * CONSTANTS.lambdaC**3 * CONSTANTS.omega_per_eps

    def __repr__(self):
        return f"TabulatedSpectrum(<{self.omega.size} samples>)"

    def photon_density(self, eps):
        eps = np.asarray(eps, dtype=float)
        flat = np.atleast_1d(eps)
        out = np.zeros_like(flat)
        xs, ys = self._eps, self._n
        inside = (flat >= xs[0]) & (flat <= xs[-1])
        e = flat[inside]
        k = np.clip(np.searchsorted(xs, e, side="right") - 1, 0, xs.size - 2)
        x0, x1, y0, y1 = xs[k], xs[k + 1], ys[k], ys[k + 1]
        positive = (y0 > 0.0) & (y1 > 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.log(e / x0) / np.log(x1 / x0)
            loglog = y0 * np.exp(w * np.log(y1 / y0))
        linear = y0 + (y1 - y0) * (e - x0) / (x1 - x0)
        out[inside] = np.where(positive, loglog, linear)
        return out.reshape(eps.shape) if eps.ndim else float(out[0])

    def eps_support(self):
        return float(self._eps[0]), float(self._eps[-1])

    @classmethod
    def from_csv(cls, path) -> "TabulatedSpectrum":
        omega, rho = [], []
        with open(path, newline="") as fh:
            rows = (line for line in fh if not line.lstrip().startswith("#"))
            reader = csv.reader(rows)
            header = next(reader)
            if tuple(h.strip() for h in header) != cls.CSV_HEADER:
                raise ValueError(f"expected header {','.join(cls.CSV_HEADER)}, got {header}")
            for row in reader:
                if not row:
                    continue
                omega.append(float(row[0]))
                rho.append(float(row[1]))
        return cls(omega, rho)

    def to_csv(self, path) -> None:
        with open(Path(path), "w", newline="") as fh:
            fh.write(",".join(self.CSV_HEADER) + "\n")
            for w, r in zip(self.omega, self.rho):
                fh.write(f"{w:.12e},{r:.12e}\n")


def transformed_spectrum(spec: SpectrumModel, kin, omega: ArrayLike, xi_P: ArrayLike) -> ArrayLike:
    """Rest-frame spectrum ``rho_L(omega / D) D^2`` seen by the moving electron."""
    D = doppler(kin, xi_P)
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0.0):
        raise ValueError("frequency must be non-negative")
    return spec.density(omega / D) * np.asarray(D) ** 2


def planck_density(theta, omega: ArrayLike) -> ArrayLike:
    """Planck photon number density per cm^3 per rad/s at lab frequency ``omega``."""
    return PlanckSpectrum(theta).density(omega)


def compton_factor(kin, theta, q: float = Q_FIT) -> float:
    """K_C = q theta gamma; K_C << 1 is the Thomson regime."""
    return q * _theta_value(theta) * as_kinematics(kin).gamma
