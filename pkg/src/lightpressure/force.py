"""Radiation-pressure force on an electron in an isotropic photon bath.

All forces are dimensionless, ``f = d mu / d tau`` with ``tau = t / t_C``,
normalised so that Thomson scattering in a Planck bath gives
``f = -theta^4 mu gamma``.

Three independent routes to the same number are provided:

* :func:`force_general`      nested (photon energy, angle) integral in the
  electron frame, any spectrum;
* :func:`force_general_alt`  the same integral with the lab photon energy as
  outer variable, any spectrum;
* :func:`force_blackbody`    the Planck-specific reduction to a single
  integral over dilogarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .numerics import QuadratureConfig, dilog_exp, integrate_finite, log1mexp
from .quantities import (
    Q_FIT,
    ElectronKinematics,
    PlanckSpectrum,
    SpectrumModel,
    _theta_value,
    as_kinematics,
)
from .xsection import SigmaLike, resolve_sigma

__all__ = [
    "ConvergenceError",
    "ForceEvaluation",
    "TrajectoryPoint",
    "force_general",
    "force_general_alt",
    "force_blackbody",
    "force_thompson",
    "force_model",
    "theta_factor",
    "theta_factor_model",
    "thompson_trajectory",
    "force_variants",
    "evaluate_force",
    "METHODS",
]

# 45 / (64 pi^5): converts the photon-number integrals (per lambda_C^3) to f
_GENERAL_PREFACTOR = 45.0 / (64.0 * math.pi**5)
_BLACKBODY_PREFACTOR = 45.0 / (8.0 * math.pi**4)
_THETA_PREFACTOR = 15.0 / (16.0 * math.pi**4)

#: below this momentum the blackbody force uses -mu theta^4 Theta(theta)
SMALL_MU = 1e-4
#: below this speed the S- + S+ combination is evaluated as an angular integral
_SMALL_BETA = 0.05

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)

METHODS = ("general17", "general18", "blackbody", "model", "thompson")


class ConvergenceError(RuntimeError):
    """A quadrature did not reach its tolerance."""


@dataclass(frozen=True)
class ForceEvaluation:
    f: float
    q_factor: float
    method: str
    error_estimate: float = 0.0
    converged: bool = True
    mu: float = float("nan")
    theta: float = float("nan")


@dataclass(frozen=True)
class TrajectoryPoint:
    tau: np.ndarray
    mu: np.ndarray


def _q(f, mu, theta, at_rest):
    if mu == 0.0:
        return at_rest
    return abs(f) / (mu * theta**4)


def _default_cfg(cfg):
    return cfg or QuadratureConfig(rel_tol=1e-10)


# ---------------------------------------------------------------------------
# closed forms


def force_thompson(kin, theta) -> ForceEvaluation:
    """Classical drag ``-theta^4 mu gamma`` (constant cross-section)."""
    kin = as_kinematics(kin)
    theta = _theta_value(theta)
    f = -(theta**4) * kin.mu * kin.gamma
    return ForceEvaluation(f, _q(f, kin.mu, theta, 1.0), "thompson", mu=kin.mu, theta=theta)


def force_model(kin, theta, q: float = Q_FIT) -> ForceEvaluation:
    """Analytic interpolation ``-mu theta^3 ln(1 + K_C) / q`` with ``K_C = q theta gamma``."""
    kin = as_kinematics(kin)
    theta = _theta_value(theta)
    f = -kin.mu * theta**3 * math.log1p(q * theta * kin.gamma) / q
    return ForceEvaluation(f, _q(f, kin.mu, theta, theta_factor_model(theta, q)), "model", mu=kin.mu, theta=theta)


def theta_factor_model(theta, q: float = Q_FIT) -> float:
    """Low-velocity factor implied by the analytic model: ln(1 + q theta) / (q theta)."""
    x = q * _theta_value(theta)
    return math.log1p(x) / x


def theta_factor(theta, sigma: SigmaLike = "mt", cfg: Optional[QuadratureConfig] = None) -> float:
    """Low-velocity QED factor: ``f -> -mu theta^4 Theta(theta)`` as mu -> 0.

    ``Theta = 15/(16 pi^4) int_0^inf s(x theta) x^4 / sinh^2(x/2) dx`` with
    ``s`` the momentum-transfer cross-section in units of sigma0.
    """
    theta = _theta_value(theta)
    s = resolve_sigma(sigma)
    cfg = _default_cfg(cfg)

    def integrand(t):
        x = np.exp(t)
        # x^4 / sinh^2(x/2) = 4 x^4 e^-x / (1 - e^-x)^2, times dx = x dt
        return s(x * theta) * 4.0 * x**5 * np.exp(-x) / np.expm1(-x) ** 2

    res = integrate_finite(integrand, math.log(1e-6), math.log(250.0), cfg, breakpoints=(0.0, math.log(10.0)))
    if not res.converged:
        raise ConvergenceError(f"Theta({theta}) did not converge: {res}")
    return _THETA_PREFACTOR * res.value


# ---------------------------------------------------------------------------
# Planck-specific single integral


def _s_pair_sum(y, kin: ElectronKinematics):
    """S- + S+ at photon variable ``y`` (vectorised).

    For slow electrons the dilogarithm form cancels to O(beta^3); there the
    equivalent angular integral ``-y^3 beta^2 int zeta / (e^{y(1+beta zeta)} - 1)``
    is used instead.
    """
    beta = kin.beta
    if beta >= _SMALL_BETA:
        a_minus = y * kin.one_minus_beta
        a_plus = y * (1.0 + beta)
        s_minus = -y * dilog_exp(a_minus) - y * y * beta * log1mexp(a_minus)
        s_plus = y * dilog_exp(a_plus) - y * y * beta * log1mexp(a_plus)
        return s_minus + s_plus
    u = y[:, None] * (1.0 + beta * _GL_NODES[None, :])
    with np.errstate(over="ignore"):
        inner = (_GL_NODES[None, :] / np.expm1(u)) @ _GL_WEIGHTS
    return -(y**3) * beta * beta * inner


def force_blackbody(
    kin, theta, sigma: SigmaLike = "mt", cfg: Optional[QuadratureConfig] = None
) -> ForceEvaluation:
    """Force in a Planck bath from the one-dimensional dilogarithm integral.

    ``f = -(45 / 8 pi^4) theta^4 / (mu gamma)^2 int s(x theta / gamma) (S- + S+) dx``
    where ``S+- = +-x Li2(e^{-x(1+-beta)}) - x^2 beta ln(1 - e^{-x(1+-beta)})``.
    The integral runs over ``ln x``; the slow tail is governed by
    ``exp(-x (1 - beta))`` so the upper cut scales with ``1 / (1 - beta)``.
    """
    kin = as_kinematics(kin)
    theta = _theta_value(theta)
    s = resolve_sigma(sigma)
    cfg = _default_cfg(cfg)
    mu, gamma = kin.mu, kin.gamma
    if mu == 0.0:
        return ForceEvaluation(0.0, theta_factor(theta, sigma, cfg), "blackbody", mu=mu, theta=theta)
    if mu < SMALL_MU:
        big_theta = theta_factor(theta, sigma, cfg)
        f = -mu * theta**4 * big_theta
        return ForceEvaluation(f, big_theta, "blackbody", mu=mu, theta=theta)

    def integrand(t):
        y = np.exp(t)
        return s(y * theta / gamma) * _s_pair_sum(y, kin) * y

    t_lo = math.log(1e-5)
    t_hi = math.log(100.0 / kin.one_minus_beta)
    breaks = [0.0, -math.log(kin.one_minus_beta), math.log(gamma / theta)]
    res = integrate_finite(integrand, t_lo, t_hi, cfg, breakpoints=[b for b in breaks if t_lo < b < t_hi])
    scale = _BLACKBODY_PREFACTOR * theta**4 / (mu * gamma) ** 2
    f = -scale * res.value
    return ForceEvaluation(
        f, _q(f, mu, theta, None), "blackbody", scale * res.error_estimate, res.converged, mu=mu, theta=theta
    )


# ---------------------------------------------------------------------------
# general spectrum, nested integrals


def _spectrum_of(spec) -> SpectrumModel:
    if isinstance(spec, SpectrumModel):
        return spec
    return PlanckSpectrum(spec)


def _inner_cfg(cfg: QuadratureConfig) -> QuadratureConfig:
    return QuadratureConfig(
        rel_tol=cfg.rel_tol / 10.0, abs_tol=cfg.abs_tol, max_evaluations=min(cfg.max_evaluations, 200_000)
    )


def _angular_window(kin: ElectronKinematics):
    """Range of w = ln(1 + beta zeta) for zeta in [-1, 1]."""
    return math.log(kin.one_minus_beta), math.log1p(kin.beta)


def force_general(
    kin, spec, sigma: SigmaLike = "mt", cfg: Optional[QuadratureConfig] = None
) -> ForceEvaluation:
    """Force for an arbitrary isotropic spectrum, rest-frame photon energy outermost.

    ``f = 45/(64 pi^5 gamma^2) int eps s(eps)
           [ int_{-1}^{1} n(eps gamma (1 + beta zeta)) zeta / (1 + beta zeta)^2 dzeta ] deps``

    with ``n`` the lab photon density per lambda_C^3 per unit energy. Both
    integrals are done in logarithmic variables (``ln eps`` and
    ``w = ln(1 + beta zeta)``).
    """
    kin = as_kinematics(kin)
    spec = _spectrum_of(spec)
    s = resolve_sigma(sigma)
    cfg = _default_cfg(cfg)
    theta = getattr(spec, "theta", float("nan"))
    if kin.mu == 0.0:
        return ForceEvaluation(0.0, float("nan"), "general17", mu=0.0, theta=theta)
    gamma, beta = kin.gamma, kin.beta
    nu_lo, nu_hi = spec.eps_support()
    w_min, w_max = _angular_window(kin)
    icfg = _inner_cfg(cfg)
    status = {"ok": True, "err": 0.0}

    def inner(eps):
        if beta < _SMALL_BETA:
            # fold zeta -> -zeta so the O(beta) antisymmetric part is formed pointwise
            def folded(z):
                up, dn = 1.0 + beta * z, 1.0 - beta * z
                n_up = spec.photon_density(eps * gamma * up) / up**2
                n_dn = spec.photon_density(eps * gamma * dn) / dn**2
                return z * (n_up - n_dn)

            res = integrate_finite(folded, 0.0, 1.0, icfg)
            status["ok"] &= res.converged
            return res.value
        lo = max(w_min, math.log(nu_lo / (eps * gamma)))
        hi = min(w_max, math.log(nu_hi / (eps * gamma)))
        if not lo < hi:
            return 0.0

        def g(w):
            zeta = np.expm1(w) / beta
            return spec.photon_density(eps * gamma * np.exp(w)) * zeta * np.exp(-w) / beta

        res = integrate_finite(g, lo, hi, icfg)
        status["ok"] &= res.converged
        return res.value

    def outer(t):
        eps = np.exp(t)
        vals = np.array([inner(e) for e in eps])
        return eps * eps * s(eps) * vals

    res = integrate_finite(outer, math.log(nu_lo / (gamma + kin.mu)), math.log(nu_hi * (gamma + kin.mu)), cfg)
    scale = _GENERAL_PREFACTOR / gamma**2
    f = scale * res.value
    q = abs(f) / (kin.mu * theta**4) if theta == theta else float("nan")
    return ForceEvaluation(
        f, q, "general17", scale * res.error_estimate, res.converged and status["ok"], mu=kin.mu, theta=theta
    )


def force_general_alt(
    kin, spec, sigma: SigmaLike = "mt", cfg: Optional[QuadratureConfig] = None
) -> ForceEvaluation:
    """Same force with the lab photon energy ``nu`` outermost.

    ``f = 45/(64 pi^5 gamma^4) int nu n(nu)
           [ int_{-1}^{1} s(nu / (gamma (1 + beta zeta))) zeta / (1 + beta zeta)^4 dzeta ] dnu``
    """
    kin = as_kinematics(kin)
    spec = _spectrum_of(spec)
    s = resolve_sigma(sigma)
    cfg = _default_cfg(cfg)
    theta = getattr(spec, "theta", float("nan"))
    if kin.mu == 0.0:
        return ForceEvaluation(0.0, float("nan"), "general18", mu=0.0, theta=theta)
    gamma, beta = kin.gamma, kin.beta
    nu_lo, nu_hi = spec.eps_support()
    w_min, w_max = _angular_window(kin)
    icfg = _inner_cfg(cfg)
    status = {"ok": True}

    def inner(nu):
        if beta < _SMALL_BETA:
            def folded(z):
                up, dn = 1.0 + beta * z, 1.0 - beta * z
                return z * (s(nu / (gamma * up)) / up**4 - s(nu / (gamma * dn)) / dn**4)

            res = integrate_finite(folded, 0.0, 1.0, icfg)
            status["ok"] &= res.converged
            return res.value

        def g(w):
            zeta = np.expm1(w) / beta
            return s(nu * np.exp(-w) / gamma) * zeta * np.exp(-3.0 * w) / beta

        res = integrate_finite(g, w_min, w_max, icfg)
        status["ok"] &= res.converged
        return res.value

    def outer(t):
        nu = np.exp(t)
        vals = np.array([inner(v) for v in nu])
        return nu * nu * spec.photon_density(nu) * vals

    res = integrate_finite(outer, math.log(nu_lo), math.log(nu_hi), cfg)
    scale = _GENERAL_PREFACTOR / gamma**4
    f = scale * res.value
    q = abs(f) / (kin.mu * theta**4) if theta == theta else float("nan")
    return ForceEvaluation(
        f, q, "general18", scale * res.error_estimate, res.converged and status["ok"], mu=kin.mu, theta=theta
    )


# ---------------------------------------------------------------------------


def evaluate_force(mu, theta, method: str = "blackbody", sigma: SigmaLike = "mt", cfg=None) -> ForceEvaluation:
    """Dispatch on the method names used by the command line."""
    method = method.lower()
    if method == "blackbody":
        return force_blackbody(mu, theta, sigma, cfg)
    if method == "general17":
        return force_general(mu, PlanckSpectrum(theta), sigma, cfg)
    if method == "general18":
        return force_general_alt(mu, PlanckSpectrum(theta), sigma, cfg)
    if method == "model":
        return force_model(mu, theta)
    if method == "thompson":
        return force_thompson(mu, theta)
    raise ValueError(f"unknown force method {method!r}; expected one of {METHODS}")


def force_variants(mu, theta, cfg=None) -> dict[str, ForceEvaluation]:
    """The three curves compared near K_C ~ 1: full sigma_MT, sigma_KN only, and the model."""
    return {
        "mt": force_blackbody(mu, theta, "mt", cfg),
        "kn": force_blackbody(mu, theta, "kn", cfg),
        "model": force_model(mu, theta),
    }


def thompson_trajectory(mu0: float, theta, tau) -> TrajectoryPoint:
    """Closed-form momentum decay under Thomson drag: ``mu = 1 / sinh(tau theta^4 + delta0)``.

    ``delta0 = asinh(1 / mu0) = ln((1 + gamma0) / mu0)``.
    """
    if not mu0 > 0.0:
        raise ValueError("initial momentum must be positive")
    theta = _theta_value(theta)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0.0):
        raise ValueError("time must be non-negative")
    delta0 = math.asinh(1.0 / mu0)
    mu = 1.0 / np.sinh(tau * theta**4 + delta0)
    return TrajectoryPoint(tau=tau, mu=mu)
