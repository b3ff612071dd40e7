import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from lightpressure.force import force_blackbody, theta_factor, thompson_trajectory
from lightpressure.kinetics import (
    CharacteristicsSolution,
    DistributionGrid,
    FokkerPlanckSolver,
    StepControlError,
    characteristics_solve,
    component_excess_kurtosis,
    fit_effective_temperature,
    fp_evolve,
    fp_snapshots,
    gaussian_pulse,
    mb_density,
    mean_gamma,
    mj_density,
    mj_peak_gamma,
    model_drag,
    regime_of,
    relative_entropy,
    relaxation_rate,
    relaxation_rate_hot,
    relaxation_rate_thompson,
    tabulated_drag,
    thompson_drag,
    trajectory_time_scale,
)
from lightpressure.numerics import QuadratureConfig, integrate_finite
from lightpressure.quantities import CONSTANTS


def _log_integral(fn, lo, hi):
    cfg = QuadratureConfig(rel_tol=1e-12)
    return integrate_finite(lambda t: fn(np.exp(t)) * np.exp(t), math.log(lo), math.log(hi), cfg).value


# --- equilibrium distributions -------------------------------------------------------------


@pytest.mark.parametrize("theta", [1e-3, 0.1, 1.7, 100.0])
def test_mj_normalised(theta):
    scale = math.sqrt(theta) if theta < 1 else theta
    total = _log_integral(lambda m: mj_density(m, theta), 1e-8 * scale, 2e3 * scale)
    assert total == pytest.approx(1.0, rel=1e-8)


def test_mj_tail_does_not_underflow_prematurely():
    assert mj_density(1.0, 1e-3) > 0.0
    assert mj_density(0.0, 0.1) == 0.0


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0, 3.0])
def test_mj_close_to_mb_when_cold(k):
    theta = 1e-3
    mu = k * math.sqrt(theta)
    assert mj_density(mu, theta) == pytest.approx(mb_density(mu, theta), rel=1e-2)


@pytest.mark.xfail(strict=True, reason="at mu = 5 sqrt(theta) the relativistic correction mu^4/8theta is 7.8%")
def test_mj_close_to_mb_at_five_thermal_widths():
    theta = 1e-3
    mu = 5.0 * math.sqrt(theta)
    assert mj_density(mu, theta) == pytest.approx(mb_density(mu, theta), rel=1e-2)


@pytest.mark.parametrize("theta", [0.01, 0.5, 10.0])
def test_mj_peak(theta):
    gamma_in = math.sqrt(1.0 + 2.0 * theta * (theta + math.sqrt(1.0 + theta * theta)))
    assert mj_peak_gamma(theta) == pytest.approx(gamma_in, rel=1e-14)
    mu_peak = math.sqrt(gamma_in**2 - 1.0)
    grid = DistributionGrid.default_for(mu_peak, lambda m: mj_density(m, theta), cells=2000)
    i = int(np.argmax(grid.density))
    assert grid.edges[i - 1] <= mu_peak <= grid.edges[i + 2]


def test_mb_moments():
    theta = 0.02
    s = math.sqrt(theta)
    assert _log_integral(lambda m: mb_density(m, theta), 1e-9 * s, 40 * s) == pytest.approx(1.0, rel=1e-10)
    m2 = _log_integral(lambda m: m * m * mb_density(m, theta), 1e-9 * s, 40 * s)
    assert m2 == pytest.approx(3.0 * theta, rel=1e-10)
    mus = np.linspace(0.5 * s, 2.5 * s, 20001)
    assert mus[np.argmax(mb_density(mus, theta))] == pytest.approx(math.sqrt(2 * theta), abs=2 * (mus[1] - mus[0]))


def test_gaussian_pulse_normalised():
    mus = np.linspace(0.0, 200.0, 200001)
    vals = gaussian_pulse(mus, 100.0, 10.0)
    assert trapezoid(vals, mus) == pytest.approx(1.0, rel=1e-9)


# --- relaxation estimates ---------------------------------------------------------------------


def test_compton_threshold_time():
    r = relaxation_rate(0.1, 1.0)
    assert r.t_rlx_seconds == pytest.approx(2.3e-14, rel=0.05, abs=0)
    assert r.regime == "General"


def test_beam_in_fusion_bath():
    gamma = 50e6 / CONSTANTS.rest_energy_ev
    r = relaxation_rate(1.7, gamma)
    assert gamma == pytest.approx(97.8, abs=0.1)
    assert r.compton_factor == pytest.approx(1.7e3, rel=0.05)
    assert r.t_rlx_seconds == pytest.approx(0.4e-18, rel=0.15, abs=0)
    assert r.regime == "Compton"


def test_laboratory_furnace():
    r = relaxation_rate(1300.0 / CONSTANTS.kelvin_per_theta, 1.0)
    assert r.theta_eq == pytest.approx(2.2e-7, rel=0.01)
    assert r.t_rlx_seconds == pytest.approx(0.7e9, rel=0.10)
    assert r.regime == "Thompson"


def test_log_rate_thomson_limit():
    theta = 1e-7
    assert relaxation_rate(theta).tau_rlx == pytest.approx(relaxation_rate_thompson(theta).tau_rlx, rel=1e-5)
    assert relaxation_rate(theta, 3.0).tau_rlx == pytest.approx(1.0 / (2 * theta**4 * 3.0), rel=1e-5)


def test_hot_start_estimate():
    r = relaxation_rate_hot(0.1, 10.0)
    assert r.tau_rlx == pytest.approx(10.0 / (2e-3 * math.log(20.0)), rel=1e-14)
    assert r.formula == "hot"
    with pytest.raises(ValueError):
        relaxation_rate_hot(0.01, 1.0)


def test_trajectory_scale():
    assert trajectory_time_scale(0.1, 2.0).tau_rlx == pytest.approx(5000.0, rel=1e-14)


@pytest.mark.parametrize("k,regime", [(0.01, "Thompson"), (0.0999, "Thompson"), (0.1, "General"), (10.0, "General"), (10.01, "Compton")])
def test_regime_boundaries(k, regime):
    assert regime_of(k) == regime


def test_relaxation_domain():
    with pytest.raises(ValueError):
        relaxation_rate(0.1, 0.5)
    with pytest.raises(ValueError):
        relaxation_rate(-0.1)


# --- grid --------------------------------------------------------------------------------------


def test_grid_validation():
    with pytest.raises(ValueError):
        DistributionGrid(np.array([0.0, 1.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        DistributionGrid(np.array([0.0, 2.0, 1.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        DistributionGrid(np.array([0.0, 1.0, 2.0]), np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        DistributionGrid.log_spaced(0.0, 1.0)


def test_default_grid_window():
    g = DistributionGrid.default_for(50.0)
    assert g.edges[0] == pytest.approx(5e-3) and g.edges[-1] == pytest.approx(5e5)
    assert g.density.size == 400
    np.testing.assert_allclose(g.centers, np.sqrt(g.edges[:-1] * g.edges[1:]))


def test_grid_csv():
    g = DistributionGrid.log_spaced(1e-3, 1.0, 5, lambda m: m, theta_eq=0.1, tau=2.5, method="fp")
    lines = g.to_csv().splitlines()
    assert lines[:4] == ["# tau=2.5", "# theta_eq=0.1", "# method=fp", "mu,rho"]
    assert len(lines) == 9
    mu, rho = map(float, lines[4].split(","))
    assert mu == pytest.approx(g.centers[0], rel=1e-11) and rho == pytest.approx(g.density[0], rel=1e-11)


# --- Fokker-Planck solver ------------------------------------------------------------------------


def _mj_grid(theta, cells=400):
    return DistributionGrid.default_for(math.sqrt(2 * theta), lambda m: mj_density(m, theta), cells=cells)


def test_equilibrium_flux_vanishes():
    theta = 0.05
    solver = FokkerPlanckSolver(_mj_grid(theta), theta)
    flux = solver.flux()
    w = solver.grid.widths
    scale = np.abs(solver._upper[:-1] * w[:-1] * solver.grid.density[1:])
    assert np.max(np.abs(flux) / np.maximum(scale, 1e-300)) < 1e-10


@pytest.mark.parametrize("theta", [1e-3, 0.05, 2.0])
def test_equilibrium_is_stationary(theta):
    grid = _mj_grid(theta)
    out = fp_evolve(grid, theta, thompson_drag, 5.0 / theta**4)
    drift = math.fsum(np.abs(out.density - grid.density) * grid.widths) / grid.total
    assert drift < 1e-6


def test_stationary_under_model_drag():
    theta = 0.3
    grid = _mj_grid(theta)
    out = fp_evolve(grid, theta, model_drag, 5.0 / theta**4)
    assert math.fsum(np.abs(out.density - grid.density) * grid.widths) / grid.total < 1e-6


@pytest.fixture(scope="module")
def relaxation_run():
    te, ti = 1e-2, 2e-2
    grid = DistributionGrid.default_for(math.sqrt(2 * ti), lambda m: mb_density(m, ti))
    T = 0.5 / te**4
    times = np.linspace(0.0, 3.0 * T, 31)[1:]
    snaps = fp_snapshots(grid, te, thompson_drag, times)
    return te, ti, T, grid, times, snaps


def test_conservation_and_positivity(relaxation_run):
    _, _, _, grid, _, snaps = relaxation_run
    for s in snaps:
        assert s.total == pytest.approx(grid.total, rel=1e-8)
        assert np.all(s.density >= 0.0)


def test_gaussian_relaxation_time(relaxation_run):
    from scipy.optimize import curve_fit

    te, ti, T, _, times, snaps = relaxation_run
    th = np.array([fit_effective_temperature(s).theta for s in snaps])
    (tau_fit,), _ = curve_fit(lambda t, tau: te + (ti - te) * np.exp(-t / tau), times, th, p0=[T])
    assert tau_fit == pytest.approx(T, rel=0.05)


def test_gaussian_stays_gaussian(relaxation_run):
    snaps = relaxation_run[-1]
    assert max(abs(component_excess_kurtosis(s)) for s in snaps) < 0.05
    assert all(fit_effective_temperature(s).good for s in snaps)


def test_relative_entropy_decreases(relaxation_run):
    te, _, _, grid, _, snaps = relaxation_run
    h = [relative_entropy(grid, te)] + [relative_entropy(s, te) for s in snaps]
    assert np.all(np.diff(h) <= 1e-12)
    assert h[-1] < 1e-2 * h[0]


def test_hot_start_against_estimate():
    """Mean-gamma excess of an MJ(10) start in a theta = 0.1 bath decays on the hot-start scale."""
    te, ti = 0.1, 10.0
    mu_peak = math.sqrt(mj_peak_gamma(ti) ** 2 - 1.0)
    grid = DistributionGrid.default_for(mu_peak, lambda m: mj_density(m, ti), cells=1600)
    g_eq = mean_gamma(grid.with_density(mj_density(grid.centers, te)))
    excess0 = mean_gamma(grid) - g_eq
    solver = FokkerPlanckSolver(grid, te, model_drag)
    estimate = relaxation_rate_hot(te, ti).tau_rlx
    trace = []
    solver.advance(4.0 * estimate, callback=lambda g: trace.append((g.tau, mean_gamma(g) - g_eq)))
    taus, exc = map(np.array, zip(*trace))
    k = int(np.argmax(exc < excess0 / math.e))
    assert k > 0
    # linear interpolation in log(excess) for the crossing time
    t0, t1, e0, e1 = taus[k - 1], taus[k], exc[k - 1], exc[k]
    t_e = t0 + (t1 - t0) * (math.log(e0) - math.log(excess0 / math.e)) / (math.log(e0) - math.log(e1))
    assert 0.5 < t_e / estimate < 2.0


def test_solver_rejects_positive_drag():
    with pytest.raises(ValueError):
        FokkerPlanckSolver(_mj_grid(0.1), 0.1, lambda m, t: np.abs(m))


def test_solver_cannot_run_backwards():
    s = FokkerPlanckSolver(_mj_grid(0.1), 0.1)
    s.advance(1.0)
    with pytest.raises(ValueError):
        s.advance(0.5)


def test_step_control_error_on_tiny_floor():
    assert issubclass(StepControlError, RuntimeError)
    grid = DistributionGrid.log_spaced(1e-3, 10.0, 50, lambda m: gaussian_pulse(m, 5.0, 0.05))
    s = FokkerPlanckSolver(grid, 0.5, max_rel_change=1e-300, dt_min=1e-6)
    with pytest.raises(StepControlError):
        s.advance(1.0)


def test_advection_mode_conserves():
    grid = DistributionGrid.linear(1.0, 200.0, 400, lambda m: gaussian_pulse(m, 100.0, 10.0))
    out = fp_evolve(grid, 1.0, model_drag, 1.0, diffusion=False)
    assert out.total == pytest.approx(grid.total, rel=1e-10)
    assert np.all(out.density >= 0.0)
    assert out.method == "fp-advect"


# --- effective temperature fits -----------------------------------------------------------------


@pytest.mark.parametrize("theta", [0.01, 0.03])
def test_self_fit(theta):
    grid = DistributionGrid.default_for(math.sqrt(2 * theta), lambda m: mb_density(m, theta))
    fit = fit_effective_temperature(grid)
    assert fit.theta == pytest.approx(theta, rel=1e-6)
    assert fit.good and fit.residual < 1e-6


def test_mixture_flagged_poor():
    pure = fit_effective_temperature(DistributionGrid.default_for(0.2, lambda m: mb_density(m, 0.01)))
    mix = DistributionGrid.default_for(0.2, lambda m: 0.5 * mb_density(m, 0.01) + 0.5 * mb_density(m, 0.02))
    fit = fit_effective_temperature(mix)
    assert not fit.good
    assert fit.residual > 10 * max(pure.residual, 1e-3)


def test_fit_rejects_empty():
    with pytest.raises(ValueError):
        fit_effective_temperature(DistributionGrid.log_spaced(1e-3, 1.0, 10))


# --- characteristics -------------------------------------------------------------------------------


def _pulse(m):
    return gaussian_pulse(m, 100.0, 10.0)


def test_characteristics_identity_at_zero_time():
    sol = characteristics_solve(_pulse, thompson_drag, 0.0, 1.0, 1e-3, 1e4)
    mu = np.linspace(50.0, 150.0, 101)
    np.testing.assert_allclose(sol(mu), _pulse(mu), rtol=1e-10)


@pytest.mark.parametrize("mu0", [0.05, 3.0, 100.0])
def test_characteristics_follow_thomson_trajectory(mu0):
    sol = CharacteristicsSolution(_pulse, thompson_drag, 1.0, 0.0, 1e-4, 1e4)
    taus = np.linspace(0.0, 2.0, 9)
    exact = thompson_trajectory(mu0, 1.0, taus).mu
    np.testing.assert_allclose(sol.trajectory(mu0, taus), exact, rtol=1e-8)


def test_characteristics_conserve_number():
    tau = 0.01
    # momenta above 1 / tau trace back to infinity and carry no electrons
    sol = characteristics_solve(_pulse, thompson_drag, tau, 1.0, 1e-3, 1e4, beyond="zero")
    centre = float(thompson_trajectory(100.0, 1.0, tau).mu)
    total = _log_integral(sol, 1e-2, 400.0)
    assert total == pytest.approx(1.0, rel=1e-6)
    mus = np.linspace(0.5 * centre, 1.5 * centre, 20001)
    peak = mus[np.argmax(sol(mus) * np.abs(thompson_drag(mus, 1.0)))]
    # rho |f| is constant along characteristics, so its maximum maps from that of rho0 |f|
    mu0s = np.linspace(50.0, 150.0, 20001)
    start = mu0s[np.argmax(_pulse(mu0s) * np.abs(thompson_drag(mu0s, 1.0)))]
    assert peak == pytest.approx(float(thompson_trajectory(start, 1.0, tau).mu), rel=1e-3)
    assert peak == pytest.approx(centre, rel=0.02)


def test_characteristics_outside_table():
    sol = characteristics_solve(_pulse, thompson_drag, 1e-3, 1.0, 1e-3, 120.0)
    with pytest.raises(ValueError):
        sol(np.array([119.0]))
    soft = characteristics_solve(_pulse, thompson_drag, 1e-3, 1.0, 1e-3, 120.0, beyond="zero")
    assert soft(np.array([119.0]))[0] == 0.0
    with pytest.raises(ValueError):
        characteristics_solve(_pulse, thompson_drag, -1.0, 1.0)


# --- tabulated drag ----------------------------------------------------------------------------------


def test_tabulated_drag():
    theta = 0.2
    table = np.geomspace(1e-3, 1e3, 61)
    drag = tabulated_drag(theta, table)
    for m in (2e-3, 0.7, 31.0):
        assert drag(np.array([m]))[0] == pytest.approx(force_blackbody(m, theta).f, rel=2e-3)
    np.testing.assert_allclose(drag(table[::10]), [force_blackbody(m, theta).f for m in table[::10]], rtol=1e-12)
    assert drag(np.array([1e-6]))[0] == pytest.approx(-1e-6 * theta**4 * theta_factor(theta), rel=1e-12)
