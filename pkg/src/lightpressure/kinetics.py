"""Electron kinetics in a thermal photon bath.

Densities are number densities per unit dimensionless momentum,
``rho(mu) = mu^2 g(mu)`` up to the constant solid-angle factor. The
Fokker-Planck equation solved here is

    d rho / d tau + d J / d mu = 0,
    J = mu^2 f g + mu f theta gamma dg/dmu
      = mu f theta gamma exp(-gamma/theta) d/dmu [g exp(gamma/theta)],

with a drag ``f(mu) < 0`` and a bath temperature ``theta`` held fixed.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import linalg, optimize, special
from scipy.interpolate import PchipInterpolator

from .force import force_blackbody, theta_factor
from .numerics import bessel_k2_scaled
from .quantities import CONSTANTS, Q_FIT, _theta_value

__all__ = [
    "DistributionGrid",
    "RelaxationReport",
    "EffectiveTemperatureFit",
    "FokkerPlanckSolver",
    "CharacteristicsSolution",
    "StepControlError",
    "mj_density",
    "mb_density",
    "mj_peak_gamma",
    "gaussian_pulse",
    "relaxation_rate",
    "relaxation_rate_thompson",
    "relaxation_rate_hot",
    "trajectory_time_scale",
    "regime_of",
    "thompson_drag",
    "model_drag",
    "tabulated_drag",
    "fp_evolve",
    "fp_snapshots",
    "fit_effective_temperature",
    "characteristics_solve",
    "relative_entropy",
    "component_excess_kurtosis",
    "mean_gamma",
]

DragModel = Callable[[np.ndarray, float], np.ndarray]

#: K_C thresholds separating the named regimes
THOMPSON_LIMIT = 0.1
COMPTON_LIMIT = 10.0


class StepControlError(RuntimeError):
    """The adaptive step size collapsed below its floor."""


# ---------------------------------------------------------------------------
# equilibrium distributions


def mj_density(mu, theta):
    """Maxwell-Juttner density in momentum, normalised to unit total.

    ``mu^2 exp(-gamma/theta) / (theta K_2(1/theta))``, evaluated as
    ``exp(-(gamma - 1)/theta)`` against the exponentially scaled Bessel function.
    """
    theta = _theta_value(theta)
    mu = np.asarray(mu, dtype=float)
    gamma = np.hypot(1.0, mu)
    kinetic = mu * mu / (gamma + 1.0)  # gamma - 1 without cancellation
    out = mu * mu * np.exp(-kinetic / theta) / (theta * bessel_k2_scaled(1.0 / theta))
    return out if out.ndim else float(out)


def mb_density(mu, theta):
    """Maxwell-Boltzmann density ``sqrt(2/pi) theta^-3/2 mu^2 exp(-mu^2 / 2 theta)``."""
    theta = _theta_value(theta)
    mu = np.asarray(mu, dtype=float)
    out = math.sqrt(2.0 / math.pi) * theta**-1.5 * mu * mu * np.exp(-mu * mu / (2.0 * theta))
    return out if out.ndim else float(out)


def mj_peak_gamma(theta) -> float:
    """Lorentz factor at the maximum of the MJ momentum density, ``theta + sqrt(1 + theta^2)``."""
    theta = _theta_value(theta)
    return theta + math.hypot(1.0, theta)


def gaussian_pulse(mu, center: float, width: float):
    """Unit-normalised Gaussian in mu (truncation at mu = 0 ignored)."""
    mu = np.asarray(mu, dtype=float)
    return np.exp(-0.5 * ((mu - center) / width) ** 2) / (width * math.sqrt(2.0 * math.pi))


# ---------------------------------------------------------------------------
# analytic relaxation estimates


@dataclass(frozen=True)
class RelaxationReport:
    tau_rlx: float
    t_rlx_seconds: float
    regime: str
    gamma_in: float
    theta_eq: float
    compton_factor: float
    formula: str


def regime_of(compton_factor: float) -> str:
    if compton_factor < THOMPSON_LIMIT:
        return "Thompson"
    if compton_factor > COMPTON_LIMIT:
        return "Compton"
    return "General"


def _report(tau, theta, gamma_in, q, formula):
    k = q * theta * gamma_in
    return RelaxationReport(tau, tau * CONSTANTS.tC, regime_of(k), gamma_in, theta, k, formula)


def relaxation_rate(theta_eq, gamma_in: float = 1.0, q: float = Q_FIT) -> RelaxationReport:
    """Relaxation time from the rate ``2 theta^3 ln(1 + q theta gamma_in) / q``.

    Reduces to ``1 / (2 theta^4 gamma_in)`` when ``q theta gamma_in`` is small.
    """
    theta = _theta_value(theta_eq)
    if not gamma_in >= 1.0:
        raise ValueError("gamma_in must be >= 1")
    k = q * theta * gamma_in
    rate = 2.0 * theta**3 * math.log1p(k) / q
    return _report(1.0 / rate, theta, gamma_in, q, "log-rate")


def relaxation_rate_thompson(theta_eq) -> RelaxationReport:
    """Non-relativistic Gaussian relaxation, ``tau = 1 / (2 theta^4)``."""
    theta = _theta_value(theta_eq)
    return _report(0.5 / theta**4, theta, 1.0, Q_FIT, "thompson")


def relaxation_rate_hot(theta_eq, theta_in, q: float = Q_FIT) -> RelaxationReport:
    """Hot-start estimate ``tau = q / (2 theta_eq^3 ln(2 q theta_eq theta_in))``."""
    theta = _theta_value(theta_eq)
    theta_in = _theta_value(theta_in)
    arg = 2.0 * q * theta * theta_in
    if not arg > 1.0:
        raise ValueError("hot-start estimate needs 2 q theta_eq theta_in > 1")
    tau = q / (2.0 * theta**3 * math.log(arg))
    return _report(tau, theta, mj_peak_gamma(theta_in), q, "hot")


def trajectory_time_scale(theta, gamma0: float = 1.0) -> RelaxationReport:
    """Single-particle Thomson slowing time ``1 / (gamma0 theta^4)``."""
    theta = _theta_value(theta)
    return _report(1.0 / (gamma0 * theta**4), theta, gamma0, Q_FIT, "trajectory")


# ---------------------------------------------------------------------------
# drag models (vectorised, mu >= 0)


def thompson_drag(mu, theta):
    mu = np.asarray(mu, dtype=float)
    return -(theta**4) * mu * np.hypot(1.0, mu)


def model_drag(mu, theta, q: float = Q_FIT):
    mu = np.asarray(mu, dtype=float)
    return -mu * theta**3 * np.log1p(q * theta * np.hypot(1.0, mu)) / q


def tabulated_drag(theta, mu_table: Sequence[float], sigma="mt") -> DragModel:
    """Drag from the full Planck-bath quadrature, interpolated in ln mu.

    ``f / mu`` is tabulated (it is smooth and finite at mu -> 0) and
    interpolated monotonically; below the table it is held at its limit
    ``-theta^4 Theta(theta)``.
    """
    theta = _theta_value(theta)
    mu_table = np.asarray(sorted(mu_table), dtype=float)
    ratio = np.array([force_blackbody(m, theta, sigma).f / m for m in mu_table])
    low = -(theta**4) * theta_factor(theta, sigma)
    interp = PchipInterpolator(np.log(mu_table), ratio, extrapolate=True)

    def drag(mu, _theta=theta):
        mu = np.asarray(mu, dtype=float)
        out = np.full(mu.shape, low)
        pos = mu >= mu_table[0]
        out[pos] = interp(np.log(np.minimum(mu[pos], mu_table[-1])))
        return mu * out

    return drag


# ---------------------------------------------------------------------------
# grid


@dataclass
class DistributionGrid:
    """Finite-volume representation of rho(mu) on cells ``[edges[i], edges[i+1]]``."""

    edges: np.ndarray
    density: np.ndarray
    tau: float = 0.0
    theta_eq: float = float("nan")
    method: str = "initial"

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=float)
        self.density = np.asarray(self.density, dtype=float)
        if self.edges.ndim != 1 or self.edges.size < 3:
            raise ValueError("need at least two cells")
        if np.any(np.diff(self.edges) <= 0.0) or self.edges[0] < 0.0:
            raise ValueError("edges must be non-negative and strictly increasing")
        if self.density.shape != (self.edges.size - 1,):
            raise ValueError("density must have one value per cell")
        if np.any(self.density < 0.0) or not np.all(np.isfinite(self.density)):
            raise ValueError("density must be finite and non-negative")

    @classmethod
    def log_spaced(cls, mu_min: float, mu_max: float, cells: int = 400, density=None, **kw):
        if not 0.0 < mu_min < mu_max:
            raise ValueError("need 0 < mu_min < mu_max")
        edges = np.geomspace(mu_min, mu_max, cells + 1)
        centers = np.sqrt(edges[:-1] * edges[1:])
        rho = np.zeros(cells) if density is None else np.asarray(density(centers), dtype=float)
        return cls(edges, rho, **kw)

    @classmethod
    def linear(cls, mu_min: float, mu_max: float, cells: int, density=None, **kw):
        edges = np.linspace(mu_min, mu_max, cells + 1)
        centers = 0.5 * (edges[:-1] + edges[1:])
        rho = np.zeros(cells) if density is None else np.asarray(density(centers), dtype=float)
        return cls(edges, rho, **kw)

    @classmethod
    def default_for(cls, mu_peak: float, density=None, cells: int = 400, **kw):
        """Default window ``[1e-4, 1e4] * max(1, mu_peak)``."""
        scale = max(1.0, mu_peak)
        return cls.log_spaced(1e-4 * scale, 1e4 * scale, cells, density, **kw)

    @property
    def centers(self) -> np.ndarray:
        if self.edges[0] > 0.0:
            return np.sqrt(self.edges[:-1] * self.edges[1:])
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    mu_nodes = centers

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def total(self) -> float:
        return math.fsum(self.density * self.widths)

    def moment(self, fn: Callable[[np.ndarray], np.ndarray]) -> float:
        return math.fsum(self.density * self.widths * fn(self.centers)) / self.total

    def with_density(self, density, **changes) -> "DistributionGrid":
        return replace(self, density=np.asarray(density, dtype=float), **changes)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"# tau={self.tau:.12g}\n# theta_eq={self.theta_eq:.12g}\n# method={self.method}\n")
        out.write("mu,rho\n")
        for m, r in zip(self.centers, self.density):
            out.write(f"{m:.12g},{r:.12g}\n")
        return out.getvalue()


def mean_gamma(grid: DistributionGrid) -> float:
    return grid.moment(lambda m: np.hypot(1.0, m))


def component_excess_kurtosis(grid: DistributionGrid) -> float:
    """Excess kurtosis of one Cartesian momentum component of an isotropic distribution."""
    m2 = grid.moment(lambda m: m**2)
    m4 = grid.moment(lambda m: m**4)
    return 9.0 * m4 / (5.0 * m2 * m2) - 3.0


def relative_entropy(grid: DistributionGrid, theta_eq: float) -> float:
    """Kullback-Leibler divergence of the normalised grid density from MJ(theta_eq).

    The reference is the cell-centre MJ sample, renormalised on the grid.
    """
    w = grid.widths
    mu = grid.centers
    p = grid.density / grid.total
    # log of the MJ shape, so the far tail does not underflow to zero
    log_ref = 2.0 * np.log(mu) - mu * mu / (np.hypot(1.0, mu) + 1.0) / theta_eq
    log_ref -= special.logsumexp(log_ref, b=w)
    mask = p > 0
    terms = p[mask] * (np.log(p[mask]) - log_ref[mask]) * w[mask]
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# Fokker-Planck solver


def _bernoulli(x):
    """B(x) = x / (exp(x) - 1) with B(0) = 1, safe for large |x|."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    nz = x != 0.0
    with np.errstate(over="ignore"):
        out[nz] = x[nz] / np.expm1(x[nz])
    return out


class FokkerPlanckSolver:
    """Finite-volume solver; owns and advances its grid.

    Face fluxes use exponential (Scharfetter-Gummel / Chang-Cooper) weights
    so that ``rho ~ mu^2 exp(-gamma/theta)`` sampled at the cell centres has
    identically zero flux. Time integration is backward Euler, giving an
    M-matrix system: positivity and number conservation hold for any step.

    With ``diffusion=False`` only the drift remains, a hyperbolic problem
    for which backward Euler upwinding smears pulses badly. That mode uses an
    explicit second-order upwind scheme instead (minmod-limited linear
    reconstruction, three-stage strong-stability-preserving Runge-Kutta,
    Courant number ``cfl``), which is conservative and positivity-preserving.
    """

    def __init__(
        self,
        grid: DistributionGrid,
        theta_eq: float,
        drag: DragModel = thompson_drag,
        diffusion: bool = True,
        max_rel_change: float = 0.01,
        dt_min: float = 1e-300,
        cfl: float = 0.4,
    ):
        if not 0.0 < cfl <= 0.5:
            raise ValueError("cfl must lie in (0, 0.5]")
        self.cfl = cfl
        self.theta = _theta_value(theta_eq)
        self.diffusion = diffusion
        self.max_rel_change = float(max_rel_change)
        self.dt_min = dt_min
        self.grid = grid.with_density(grid.density.copy(), theta_eq=self.theta, method="fp" if diffusion else "fp-advect")
        self.steps = 0
        self.rejected = 0
        self._dt: Optional[float] = None
        self._build(drag)

    def _build(self, drag):
        g = self.grid
        e = g.edges
        c = g.centers
        w = g.widths
        inner = e[1:-1]
        f_face = np.asarray(drag(inner, self.theta), dtype=float)
        if np.any(f_face > 0.0):
            raise ValueError("drag must be non-positive")
        n = c.size
        self._f_face = f_face
        # J_{i+1/2} = a_i rho_{i+1} - b_i rho_i for faces i = 0..n-2
        if self.diffusion:
            gam = np.hypot(1.0, c)
            delta = np.diff(gam) / self.theta
            coef = inner * f_face * self.theta * np.hypot(1.0, inner) / np.diff(c)
            a = coef * _bernoulli(-delta) / c[1:] ** 2
            b = coef * _bernoulli(delta) / c[:-1] ** 2
        else:
            a = f_face.copy()
            b = np.zeros_like(a)
        # d rho_i / d tau = (J_{i-1/2} - J_{i+1/2}) / w_i
        diag = np.zeros(n)
        upper = np.zeros(n)  # coefficient of rho_{i+1} in row i
        lower = np.zeros(n)  # coefficient of rho_{i-1} in row i
        diag[:-1] += b / w[:-1]
        upper[:-1] = -a / w[:-1]
        diag[1:] += a / w[1:]
        lower[1:] = -b / w[1:]
        self._diag, self._upper, self._lower = diag, upper, lower
        self._rate_scale = float(np.max(np.abs(diag))) or 1.0

    def flux(self, density: Optional[np.ndarray] = None) -> np.ndarray:
        """Interior face fluxes for ``density`` (default: current state)."""
        rho = self.grid.density if density is None else np.asarray(density, dtype=float)
        w = self.grid.widths
        # reconstruct a, b from the stored operator rows
        a = -self._upper[:-1] * w[:-1]
        b = -self._lower[1:] * w[1:]
        return a * rho[1:] - b * rho[:-1]

    def rhs(self, density: np.ndarray) -> np.ndarray:
        out = self._diag * density
        out[:-1] += self._upper[:-1] * density[1:]
        out[1:] += self._lower[1:] * density[:-1]
        return out

    def _implicit_step(self, rho, dt):
        n = rho.size
        ab = np.zeros((3, n))
        ab[0, 1:] = -dt * self._upper[:-1]
        ab[1] = 1.0 - dt * self._diag
        ab[2, :-1] = -dt * self._lower[1:]
        return linalg.solve_banded((1, 1), ab, rho)

    def advance(self, tau_end: float, callback: Optional[Callable[[DistributionGrid], None]] = None) -> DistributionGrid:
        """Integrate to ``tau_end`` with step control on the relative L1 change."""
        if tau_end < self.grid.tau:
            raise ValueError("cannot integrate backwards")
        if not self.diffusion:
            return self._advance_explicit(tau_end, callback)
        w = self.grid.widths
        rho = self.grid.density
        tau = self.grid.tau
        dt = self._dt or min(self.max_rel_change / self._rate_scale, max(tau_end - tau, 0.0) or 1.0)
        while tau < tau_end:
            step = min(dt, tau_end - tau)
            new = self._implicit_step(rho, step)
            norm = math.fsum(np.abs(rho) * w)
            change = math.fsum(np.abs(new - rho) * w) / norm if norm > 0 else 0.0
            if np.any(new < 0.0) or change > self.max_rel_change:
                if np.any(new < 0.0) and np.min(new) > -1e-14 * np.max(rho):
                    new = np.maximum(new, 0.0)  # solver round-off, not a scheme failure
                else:
                    self.rejected += 1
                    dt = step * 0.5
                    if dt < self.dt_min or dt <= tau * 1e-16:
                        raise StepControlError(f"step size collapsed at tau={tau:g}")
                    continue
            rho = new
            tau = tau + step if step < tau_end - tau else tau_end
            self.steps += 1
            if change < 0.25 * self.max_rel_change:
                dt = step * 2.0
            elif change < 0.5 * self.max_rel_change:
                dt = step * 1.25
            else:
                dt = step
            self.grid = self.grid.with_density(rho, tau=tau)
            if callback is not None:
                callback(self.grid)
        self._dt = dt
        return self.grid

    def _advect_rhs(self, rho):
        w = self.grid.widths
        c = self.grid.centers
        d = np.diff(rho) / np.diff(c)
        slope = np.zeros_like(rho)
        slope[1:-1] = np.where(d[:-1] * d[1:] > 0.0, np.sign(d[1:]) * np.minimum(np.abs(d[:-1]), np.abs(d[1:])), 0.0)
        # drag is towards lower mu, so face i+1/2 takes the left state of cell i+1
        left_state = rho[1:] - slope[1:] * (c[1:] - self.grid.edges[1:-1])
        flux = self._f_face * left_state
        out = np.zeros_like(rho)
        out[:-1] -= flux / w[:-1]
        out[1:] += flux / w[1:]
        return out

    def _advance_explicit(self, tau_end, callback):
        w = self.grid.widths
        # face j drains cell j + 1
        speed = np.abs(self._f_face) / w[1:]
        rho = self.grid.density
        tau = self.grid.tau
        while tau < tau_end:
            # material only moves down, so empty cells above the top occupied one stay empty
            occupied = np.flatnonzero(rho > 0.0)
            top = int(occupied[-1]) if occupied.size else 0
            active = speed[:top]
            dt_max = self.cfl / float(np.max(active)) if np.any(active > 0) else np.inf
            step = min(dt_max, tau_end - tau)
            r1 = rho + step * self._advect_rhs(rho)
            r2 = 0.75 * rho + 0.25 * (r1 + step * self._advect_rhs(r1))
            rho = rho / 3.0 + 2.0 / 3.0 * (r2 + step * self._advect_rhs(r2))
            rho = np.maximum(rho, 0.0)  # only round-off can go negative under the Courant limit
            tau = tau + step if step < tau_end - tau else tau_end
            self.steps += 1
            self.grid = self.grid.with_density(rho, tau=tau)
            if callback is not None:
                callback(self.grid)
        return self.grid


def fp_evolve(
    grid: DistributionGrid,
    theta_eq: float,
    drag: DragModel = thompson_drag,
    tau_end: float = 1.0,
    *,
    diffusion: bool = True,
    max_rel_change: float = 0.01,
) -> DistributionGrid:
    """Evolve ``grid`` to ``grid.tau + tau_end`` and return the new state."""
    solver = FokkerPlanckSolver(grid, theta_eq, drag, diffusion, max_rel_change)
    return solver.advance(grid.tau + tau_end)


def fp_snapshots(
    grid: DistributionGrid,
    theta_eq: float,
    drag: DragModel,
    times: Iterable[float],
    *,
    diffusion: bool = True,
    max_rel_change: float = 0.01,
) -> list[DistributionGrid]:
    """States at each of the (increasing) absolute times ``times``."""
    solver = FokkerPlanckSolver(grid, theta_eq, drag, diffusion, max_rel_change)
    return [solver.advance(t) for t in sorted(times)]


# ---------------------------------------------------------------------------
# effective temperature


@dataclass(frozen=True)
class EffectiveTemperatureFit:
    theta: float
    amplitude: float
    residual: float
    good: bool


def fit_effective_temperature(grid: DistributionGrid, threshold: float = 1e-2) -> EffectiveTemperatureFit:
    """Least-squares fit of ``A * MB(mu; theta)`` to the grid density.

    ``residual`` is the relative L2 misfit; ``good`` is ``residual < threshold``.
    Raises ``RuntimeError`` if the optimiser fails.
    """
    mu = grid.centers
    w = grid.widths
    rho = grid.density
    total = grid.total
    if total <= 0:
        raise ValueError("empty distribution")
    m2 = grid.moment(lambda m: m**2)
    sw = np.sqrt(w)
    scale = math.sqrt(math.fsum(rho * rho * w))

    def resid(p):
        log_a, log_t = p
        return sw * (math.exp(log_a) * mb_density(mu, math.exp(log_t)) - rho) / scale

    sol = optimize.least_squares(resid, [math.log(total), math.log(m2 / 3.0)], method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if not sol.success:
        raise RuntimeError(f"temperature fit failed: {sol.message}")
    res = float(np.sqrt(np.sum(sol.fun**2)))
    return EffectiveTemperatureFit(math.exp(sol.x[1]), math.exp(sol.x[0]), res, res < threshold)


# ---------------------------------------------------------------------------
# characteristics


_CH_NODES, _CH_WEIGHTS = np.polynomial.legendre.leggauss(16)


class CharacteristicsSolution:
    """Exact transport of a density along ``d mu / d tau = f(mu)``.

    With ``xi(mu) = int dmu / f`` (decreasing in mu since f < 0) every
    characteristic satisfies ``xi(mu(tau)) = xi(mu0) + tau`` and the density
    obeys ``rho(mu, tau) = rho0(mu0) f(mu0) / f(mu)``.
    """

    def __init__(self, initial_density, drag: DragModel, theta: float, tau: float, mu_min: float, mu_max: float,
                 nodes: int = 2000, beyond: str = "raise"):
        if not 0.0 < mu_min < mu_max:
            raise ValueError("need 0 < mu_min < mu_max")
        if beyond not in ("raise", "zero"):
            raise ValueError("beyond must be 'raise' or 'zero'")
        self.rho0 = initial_density
        self.drag = drag
        self.theta = _theta_value(theta)
        self.tau = float(tau)
        self.beyond = beyond
        self._s = np.linspace(math.log(mu_min), math.log(mu_max), nodes)
        seg = self._segment(self._s[:-1], self._s[1:])
        # xi measured from the top of the table
        self._xi = np.concatenate([[0.0], np.cumsum(seg)]) - np.sum(seg)
        self._inv = PchipInterpolator(self._xi[::-1], self._s[::-1])

    def _dxi(self, s):
        mu = np.exp(s)
        return mu / self.drag(mu, self.theta)

    def _segment(self, lo, hi):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = mid[:, None] + half[:, None] * _CH_NODES[None, :]
        return (self._dxi(x.ravel()).reshape(x.shape) @ _CH_WEIGHTS) * half

    def xi(self, mu):
        """xi(mu) relative to its value at the top of the table."""
        s = np.log(np.atleast_1d(np.asarray(mu, dtype=float)))
        k = np.clip(np.searchsorted(self._s, s) - 1, 0, self._s.size - 2)
        return self._xi[k] + self._segment(self._s[k], s)

    def origin(self, mu):
        """Initial momentum of the characteristic passing through ``mu`` at ``self.tau``."""
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        target = self.xi(mu) - self.tau
        inside = target >= -1e-12 * self._xi[0]
        if not np.all(inside) and self.beyond == "raise":
            raise ValueError("characteristic origin lies outside the tabulated momentum range")
        mu0 = np.exp(self._invert(target))
        mu0[~inside] = np.inf
        return mu0

    def _invert(self, target):
        s = self._inv(np.clip(target, 0.0, self._xi[0]))
        for _ in range(4):  # Newton polish in ln mu
            g = self.xi(np.exp(s)) - target
            s = np.clip(s - g / self._dxi(s), self._s[0], self._s[-1])
        return s

    def __call__(self, mu):
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        mu0 = self.origin(mu)
        out = np.zeros_like(mu)
        ok = np.isfinite(mu0)
        out[ok] = self.rho0(mu0[ok]) * self.drag(mu0[ok], self.theta) / self.drag(mu[ok], self.theta)
        return out

    def trajectory(self, mu0, taus):
        """Forward characteristic from ``mu0`` evaluated at times ``taus``."""
        taus = np.asarray(taus, dtype=float)
        target = self.xi(np.array([mu0]))[0] + taus
        if np.any(target > self._xi[0]):
            raise ValueError("trajectory leaves the tabulated momentum range")
        return np.exp(self._invert(target))


def characteristics_solve(initial_density, drag: DragModel, tau: float, theta: float,
                          mu_min: float = 1e-4, mu_max: float = 1e6, **kw) -> CharacteristicsSolution:
    """Diffusion-free solution at time ``tau`` as a callable ``mu -> rho``."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    return CharacteristicsSolution(initial_density, drag, theta, tau, mu_min, mu_max, **kw)
