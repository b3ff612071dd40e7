"""Photon-electron cross-sections in units of the Thomson cross-section.

Closed forms of the Klein-Nishina total cross-section and of the projection
term ``sigma_R`` cancel catastrophically for small photon energy (the
``sigma_R`` form loses ~4 digits already at eps = 1e-3), so below
``SERIES_SWITCH`` both are summed from their Taylor series. The series
coefficients are generated exactly, with rational arithmetic, from the same
closed-form expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .numerics import QuadratureConfig, QuadratureResult, integrate_finite

__all__ = [
    "CrossSectionTriple",
    "SERIES_SWITCH",
    "compton_ratio",
    "kn_differential",
    "kn_total",
    "sigma_r",
    "sigma_mt",
    "sigma_mt_oracle",
    "kn_total_oracle",
    "sigma_r_oracle",
    "cross_sections",
    "resolve_sigma",
]

SERIES_SWITCH = 0.2
_SERIES_TERMS = 64


@dataclass(frozen=True)
class CrossSectionTriple:
    eps: float
    kn: float
    r: float
    mt: float


# ---------------------------------------------------------------------------
# exact Laurent arithmetic for the series branch


class _Laurent:
    """Truncated Laurent series with Fraction coefficients (dict power -> coef)."""

    def __init__(self, terms, order):
        self.order = order
        self.terms = {k: Fraction(v) for k, v in terms.items() if k < order and v != 0}

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return _Laurent(out, self.order)

    def __neg__(self):
        return _Laurent({k: -v for k, v in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, _Laurent):
            return _Laurent({k: v * other for k, v in self.terms.items()}, self.order)
        out = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                if i + j < self.order:
                    out[i + j] = out.get(i + j, 0) + a * b
        return _Laurent(out, self.order)

    __rmul__ = __mul__


def _mono(power, order, coef=1):
    return _Laurent({power: Fraction(coef)}, order)


def _log1p_2e(order):
    return _Laurent({k: Fraction((-1) ** (k + 1) * 2**k, k) for k in range(1, order)}, order)


def _inv_pow_1p_2e(n, order):
    """(1 + 2 eps)^(-n) for n = 1, 2, 3."""
    return _Laurent({k: Fraction(math.comb(k + n - 1, n - 1) * (-2) ** k) for k in range(order)}, order)


@lru_cache(maxsize=None)
def _series_coefficients(terms: int = _SERIES_TERMS):
    # four spare orders absorb the 1/eps^4 shifts below
    order = terms + 1
    o = order + 4
    L = _log1p_2e(o)
    m = lambda p, c=1: _mono(p, o, c)  # noqa: E731
    kn = (m(-1) - m(-2, 2) - m(-3, 2)) * L + m(-1, Fraction(1, 2)) + m(-2, 4) - m(-1, Fraction(1, 2)) * _inv_pow_1p_2e(2, o)
    kn = kn * Fraction(3, 8)
    r = (
        (m(1, Fraction(2, 3)) - m(2, Fraction(4, 3))) * _inv_pow_1p_2e(3, o)
        + (m(-1, 2) + m(0, 2)) * _inv_pow_1p_2e(1, o)
        - m(-2) * L
        + (m(-1, 4) + m(0, 8) + m(1, 2)) * _inv_pow_1p_2e(2, o)
        - (m(-3, 6) + m(-2, 12) + m(-1, 6)) * _inv_pow_1p_2e(1, o)
        + (m(-4, 3) + m(-3, 3)) * L
    ) * Fraction(3, 8)
    out = []
    for series in (kn, r):
        assert all(series.terms.get(k, 0) == 0 for k in range(-4, 0)), "pole terms must cancel"
        out.append(np.array([float(series.terms.get(k, 0)) for k in range(terms)]))
    return tuple(out)


def _horner(coefs, x):
    acc = np.zeros_like(x)
    for c in coefs[::-1]:
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------


def _as_eps(eps):
    eps = np.asarray(eps, dtype=float)
    if np.any(~(eps >= 0.0)) or np.any(~np.isfinite(eps)):
        raise ValueError("photon energy must be finite and non-negative")
    return eps


def _check_angle(psi):
    psi = np.asarray(psi, dtype=float)
    if np.any((psi < 0.0) | (psi > math.pi)):
        raise ValueError("scattering angle must lie in [0, pi]")
    return psi


def _ret(x):
    return x if np.ndim(x) else float(x)


def compton_ratio(eps, psi):
    """Scattered-to-incident photon energy ratio R = 1 / (1 + eps (1 - cos psi))."""
    eps = _as_eps(eps)
    psi = _check_angle(psi)
    return _ret(1.0 / (1.0 + eps * 2.0 * np.sin(0.5 * psi) ** 2))


def kn_differential(eps, psi):
    """Klein-Nishina d sigma / dO in units of sigma0 (per steradian)."""
    R = np.asarray(compton_ratio(eps, psi))
    s2 = np.sin(np.asarray(psi, dtype=float)) ** 2
    return _ret(3.0 / (16.0 * math.pi) * R * R * (R + 1.0 / R - s2))


def _closed_kn(e):
    L = np.log1p(2.0 * e)
    return 3.0 / (8.0 * e) * ((1.0 - 2.0 / e - 2.0 / e**2) * L + 0.5 + 4.0 / e - 0.5 / (1.0 + 2.0 * e) ** 2)


def _closed_r(e):
    L = np.log1p(2.0 * e)
    p = 1.0 + 2.0 * e
    t1 = 2.0 * e * (1.0 - 2.0 * e) / (3.0 * p**3)
    t2 = 2.0 * (1.0 + e) / (e * p) - L / e**2
    t3 = 2.0 * (2.0 + 4.0 * e + e * e) / (e * p**2) - 3.0 * (1.0 + e) / e**3 * (2.0 * (1.0 + e) / p - L / e)
    return 3.0 / 8.0 * (t1 + t2 + t3)


def _branch(eps, closed, coefs):
    eps = _as_eps(eps)
    flat = np.atleast_1d(eps)
    out = np.empty_like(flat)
    small = flat < SERIES_SWITCH
    out[small] = _horner(coefs, flat[small])
    out[~small] = closed(flat[~small])
    return out.reshape(eps.shape) if eps.ndim else float(out[0])


def kn_total(eps):
    """Total Klein-Nishina cross-section sigma_KN / sigma0."""
    return _branch(eps, _closed_kn, _series_coefficients()[0])


def sigma_r(eps):
    """Projection term sigma_R / sigma0 (the R cos psi weighted cross-section)."""
    return _branch(eps, _closed_r, _series_coefficients()[1])


def sigma_mt(eps, include_projection: bool = True):
    """Momentum-transfer cross-section sigma_MT / sigma0 = sigma_KN - sigma_R.

    With ``include_projection=False`` the projection term is dropped and the
    plain Klein-Nishina value is returned.
    """
    kn = kn_total(eps)
    if not include_projection:
        return kn
    return kn - sigma_r(eps)


def cross_sections(eps: float) -> CrossSectionTriple:
    kn = kn_total(eps)
    r = sigma_r(eps)
    return CrossSectionTriple(eps=float(eps), kn=kn, r=r, mt=kn - r)


# ---------------------------------------------------------------------------
# quadrature oracles over the differential cross-section


def _angular_integral(eps, weight, cfg) -> QuadratureResult:
    eps = float(_as_eps(eps))
    cfg = cfg or QuadratureConfig(rel_tol=1e-12)

    def integrand(psi):
        R = 1.0 / (1.0 + eps * 2.0 * np.sin(0.5 * psi) ** 2)
        dsig = 3.0 / (16.0 * math.pi) * R * R * (R + 1.0 / R - np.sin(psi) ** 2)
        return 2.0 * math.pi * weight(R, psi) * dsig * np.sin(psi)

    # the forward peak has angular width ~ 1/sqrt(eps)
    breaks = []
    if eps > 1.0:
        width = 1.0 / math.sqrt(eps)
        breaks = [p for p in width * np.geomspace(1e-2, 1e2, 9) if p < math.pi]
    return integrate_finite(integrand, 0.0, math.pi, cfg, breakpoints=breaks)


def sigma_mt_oracle(eps, cfg: QuadratureConfig | None = None) -> QuadratureResult:
    """sigma_MT / sigma0 by direct quadrature of (1 - R cos psi) d sigma / dO."""
    return _angular_integral(eps, lambda R, psi: 1.0 - R * np.cos(psi), cfg)


def kn_total_oracle(eps, cfg: QuadratureConfig | None = None) -> QuadratureResult:
    return _angular_integral(eps, lambda R, psi: np.ones_like(psi), cfg)


def sigma_r_oracle(eps, cfg: QuadratureConfig | None = None) -> QuadratureResult:
    return _angular_integral(eps, lambda R, psi: R * np.cos(psi), cfg)


SigmaLike = Union[str, Callable[[np.ndarray], np.ndarray]]


def _thomson(eps):
    return np.ones_like(np.asarray(eps, dtype=float))


def resolve_sigma(sigma: SigmaLike = "mt") -> Callable[[np.ndarray], np.ndarray]:
    """Map a cross-section selector to a vectorised callable eps -> sigma / sigma0.

    ``"mt"`` full momentum transfer, ``"kn"`` Klein-Nishina without the
    projection term, ``"thomson"`` the constant classical value.
    """
    if callable(sigma):
        return sigma
    table = {
        "mt": sigma_mt,
        "kn": kn_total,
        "thomson": _thomson,
        "thompson": _thomson,
    }
    try:
        return table[sigma.lower()]
    except (KeyError, AttributeError):
        raise ValueError(f"unknown cross-section selector {sigma!r}") from None
