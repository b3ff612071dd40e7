"""Command-line front-end: ``python -m lightpressure <command> ...``.

Every command prints a table (CSV by default, JSON with ``--format json``)
preceded, for CSV, by a ``#`` block echoing the tool version and all
parameters. Floats carry 12 significant digits, so identical invocations
give byte-identical output.

Exit codes: 0 success, 2 bad arguments, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .force import METHODS, ConvergenceError, evaluate_force, theta_factor, theta_factor_model, thompson_trajectory
from .kinetics import (
    DistributionGrid,
    StepControlError,
    characteristics_solve,
    fp_snapshots,
    gaussian_pulse,
    mb_density,
    mj_density,
    mj_peak_gamma,
    model_drag,
    relaxation_rate,
    relaxation_rate_hot,
    relaxation_rate_thompson,
    thompson_drag,
)
from .numerics import QuadratureConfig
from .quantities import Q_FIT
from .scenarios import SCENARIO_FIELDS, critical_density, ics_max_energy, scenario_table
from .xsection import cross_sections

MAX_GRID = 1_000_000

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGED = 3


class UsageError(ValueError):
    pass


def parse_grid(text: str, log: bool = False) -> np.ndarray:
    """``"x"`` or ``"start:stop:count"``; spacing is geometric with ``log``."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            values = np.array([float(parts[0])])
        elif len(parts) == 3:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if not (math.isfinite(start) and math.isfinite(stop)):
                raise UsageError(f"grid {text!r} has non-finite end points")
            if not 1 <= count <= MAX_GRID:
                raise UsageError(f"grid count must be in [1, {MAX_GRID}]")
            if log:
                if not (start > 0 and stop > 0):
                    raise UsageError("log grid needs positive end points")
                values = np.geomspace(start, stop, count)
            else:
                values = np.linspace(start, stop, count)
        else:
            raise UsageError(f"bad grid {text!r}; expected value or start:stop:count")
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad grid {text!r}: {exc}") from None
    if not np.all(np.isfinite(values)):
        raise UsageError(f"grid {text!r} has non-finite values")
    return values


def _fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if v is None:
        return ""
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        v = float(f"{float(v):.12g}")
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return v


def render(columns: Sequence[str], rows: Iterable[Sequence[Any]], meta: dict, fmt: str) -> str:
    rows = list(rows)
    if fmt == "json":
        payload = {
            "meta": {k: _json_value(v) for k, v in meta.items()},
            "columns": list(columns),
            "rows": [{c: _json_value(v) for c, v in zip(columns, r)} for r in rows],
        }
        return json.dumps(payload, indent=2) + "\n"
    out = io.StringIO()
    for k, v in meta.items():
        out.write(f"# {k}={_fmt(v)}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(v) for v in r])
    return out.getvalue()


def _meta(args: argparse.Namespace) -> dict:
    meta = {"tool": f"lightpressure {__version__}", "command": args.command}
    for key in sorted(vars(args)):
        if key in ("func", "command", "output", "format"):
            continue
        meta[key] = getattr(args, key)
    return meta


def _cfg(args) -> QuadratureConfig:
    return QuadratureConfig(rel_tol=args.rel_tol, max_evaluations=args.max_evals)


# ---------------------------------------------------------------------------
# commands return (columns, rows, converged)


def cmd_xsec(args):
    eps = parse_grid(args.eps, args.log)
    if np.any(eps < 0):
        raise UsageError("photon energies must be non-negative")
    rows = []
    for e in eps:
        t = cross_sections(e)
        rows.append((t.eps, t.kn, t.r, t.mt))
    return ("eps", "sigma_kn", "sigma_r", "sigma_mt"), rows, True


def cmd_force(args):
    thetas = parse_grid(args.theta, args.log)
    mus = parse_grid(args.mu, args.log)
    if np.any(thetas <= 0) or np.any(mus < 0):
        raise UsageError("need theta > 0 and mu >= 0")
    cfg = _cfg(args)
    rows, ok = [], True
    for th in thetas:
        for m in mus:
            r = evaluate_force(float(m), float(th), args.method, args.sigma, cfg)
            ok &= r.converged
            gamma = math.hypot(1.0, m)
            rows.append((th, m, gamma, Q_FIT * th * gamma, r.f, r.q_factor, r.error_estimate, r.converged))
    return ("theta", "mu", "gamma", "K_C", "f", "Q", "error_estimate", "converged"), rows, ok


def cmd_theta_factor(args):
    thetas = parse_grid(args.theta, args.log)
    if np.any(thetas <= 0):
        raise UsageError("theta must be positive")
    cfg = _cfg(args)
    rows = [(th, theta_factor(th, args.sigma, cfg), theta_factor_model(th)) for th in thetas]
    return ("theta", "Theta", "Theta_model"), rows, True


def cmd_trajectory(args):
    tau = parse_grid(args.tau, args.log)
    if args.mu0 <= 0 or args.theta <= 0 or np.any(tau < 0):
        raise UsageError("need mu0 > 0, theta > 0, tau >= 0")
    tr = thompson_trajectory(args.mu0, args.theta, tau)
    return ("tau", "mu"), list(zip(tr.tau, tr.mu)), True


def _report_for(args):
    if args.formula == "thompson":
        return relaxation_rate_thompson(args.theta_eq)
    if args.formula == "hot":
        theta_in = args.theta_in if args.theta_in is not None else args.theta_eq
        return relaxation_rate_hot(args.theta_eq, theta_in)
    if args.gamma_in is not None:
        gamma_in = args.gamma_in
    elif args.theta_in is not None:
        gamma_in = mj_peak_gamma(args.theta_in)
    else:
        gamma_in = 1.0
    return relaxation_rate(args.theta_eq, gamma_in)


def cmd_relax(args):
    if args.gamma_in is not None and args.theta_in is not None:
        raise UsageError("give either --gamma-in or --theta-in")
    if args.formula is None:
        args.formula = "log-rate"
    rep = _report_for(args)
    cols = ("theta_eq", "gamma_in", "K_C", "tau_rlx", "t_rlx_seconds", "regime", "formula")
    return cols, [(rep.theta_eq, rep.gamma_in, rep.compton_factor, rep.tau_rlx, rep.t_rlx_seconds, rep.regime, rep.formula)], True


def cmd_plasma(args):
    if args.formula is None:
        args.formula = "hot" if args.theta_in is not None else "log-rate"
    rep = _report_for(args)
    pa = critical_density(rep.tau_rlx, args.ne, args.threshold)
    cols = ("theta_eq", "tau_rlx", "formula", "n_cr_cm3", "omega_dmp_per_s", "n_e_cm3", "damped")
    return cols, [(rep.theta_eq, pa.tau_rlx, rep.formula, pa.n_cr, pa.omega_dmp, pa.n_e, pa.damped)], True


def cmd_ics(args):
    mus = parse_grid(args.mu, args.log)
    if np.any(mus < 0) or args.eps_in <= 0:
        raise UsageError("need mu >= 0 and eps_in > 0")
    rows = []
    for m in mus:
        ev = ics_max_energy(args.eps_in, float(m))
        rows.append((m, ev.kin.gamma, ev.eps_in, ev.eps_sc_max, ev.eta))
    return ("mu", "gamma", "eps_in", "eps_sc_max", "eta"), rows, True


def cmd_scenarios(args):
    rows = [tuple(r.as_row().values()) + (r.regime,) for r in scenario_table()]
    return SCENARIO_FIELDS + ("regime",), rows, True


def _initial_density(args):
    if args.init == "mj":
        return lambda m: mj_density(m, args.theta_in), math.sqrt(mj_peak_gamma(args.theta_in) ** 2 - 1.0)
    if args.init == "mb":
        return lambda m: mb_density(m, args.theta_in), math.sqrt(2.0 * args.theta_in)
    if args.mu_center is None:
        raise UsageError("--init gauss needs --mu-center")
    width = args.width if args.width is not None else 0.1 * args.mu_center
    return lambda m: gaussian_pulse(m, args.mu_center, width), args.mu_center


def cmd_evolve(args):
    if args.theta_eq <= 0 or args.tau_end <= 0 or args.snapshots < 1:
        raise UsageError("need theta_eq > 0, tau_end > 0, snapshots >= 1")
    if args.init in ("mj", "mb") and (args.theta_in is None or args.theta_in <= 0):
        raise UsageError("--init mj|mb needs a positive --theta-in")
    rho0, peak = _initial_density(args)
    drag = {"thompson": thompson_drag, "model": model_drag}[args.drag]
    grid = DistributionGrid.default_for(peak, rho0, cells=args.cells)
    times = np.linspace(0.0, args.tau_end, args.snapshots + 1)[1:]
    rows = [(0, 0.0, m, r) for m, r in zip(grid.centers, grid.density)]
    if args.method == "fp":
        snaps = fp_snapshots(grid, args.theta_eq, drag, times, diffusion=not args.no_diffusion)
        for k, s in enumerate(snaps, 1):
            rows += [(k, s.tau, m, r) for m, r in zip(s.centers, s.density)]
    else:
        for k, t in enumerate(times, 1):
            sol = characteristics_solve(rho0, drag, t, args.theta_eq, grid.edges[0], grid.edges[-1], beyond="zero")
            rows += [(k, t, m, r) for m, r in zip(grid.centers, sol(grid.centers))]
    return ("snapshot", "tau", "mu", "rho"), rows, True


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lightpressure",
        description="Radiation-pressure force, cross-sections and electron kinetics in a photon bath.",
    )
    p.add_argument("--version", action="version", version=f"lightpressure {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default csv)")
    common.add_argument("-o", "--output", help="write to this file instead of standard output")
    common.add_argument("--log", action="store_true", help="geometric spacing for start:stop:count grids")
    common.add_argument("--rel-tol", type=float, default=1e-10, help="quadrature relative tolerance")
    common.add_argument("--max-evals", type=int, default=1_000_000, help="quadrature evaluation budget")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("xsec", parents=[common], help="cross-sections sigma_KN, sigma_R, sigma_MT")
    s.add_argument("--eps", required=True, help="photon energy grid (units of m0 c^2)")
    s.set_defaults(func=cmd_xsec)

    s = sub.add_parser("force", parents=[common], help="force f and Q factor on a (theta, mu) grid")
    s.add_argument("--theta", required=True, help="temperature value or grid")
    s.add_argument("--mu", required=True, help="momentum grid")
    s.add_argument("--method", choices=METHODS, default="blackbody")
    s.add_argument("--sigma", choices=("mt", "kn", "thomson"), default="mt",
                   help="cross-section: mt (full), kn (projection term dropped), thomson")
    s.set_defaults(func=cmd_force)

    s = sub.add_parser("theta-factor", parents=[common], help="low-velocity factor Theta(theta)")
    s.add_argument("--theta", required=True)
    s.add_argument("--sigma", choices=("mt", "kn", "thomson"), default="mt")
    s.set_defaults(func=cmd_theta_factor)

    s = sub.add_parser("trajectory", parents=[common], help="Thomson slowing-down curve mu(tau)")
    s.add_argument("--mu0", type=float, required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--tau", required=True, help="time grid")
    s.set_defaults(func=cmd_trajectory)

    rate = argparse.ArgumentParser(add_help=False)
    rate.add_argument("--theta-eq", type=float, required=True)
    rate.add_argument("--theta-in", type=float, help="initial temperature (sets gamma_in from the MJ peak)")
    rate.add_argument("--formula", choices=("log-rate", "hot", "thompson"),
                      help="relaxation estimate: log-rate (default), hot start, or Thompson")

    s = sub.add_parser("relax", parents=[common, rate], help="relaxation time estimate")
    s.add_argument("--gamma-in", type=float, help="initial Lorentz factor")
    s.set_defaults(func=cmd_relax)

    s = sub.add_parser("plasma", parents=[common, rate], help="critical density for plasma damping")
    s.add_argument("--ne", type=float, help="electron density (cm^-3) to assess")
    s.add_argument("--threshold", type=float, default=0.1, help="damped if ne < threshold * N_cr")
    s.set_defaults(func=cmd_plasma, gamma_in=None)

    s = sub.add_parser("ics", parents=[common], help="inverse-Compton maximum energy and efficiency")
    s.add_argument("--eps-in", type=float, required=True)
    s.add_argument("--mu", required=True, help="electron momentum value or grid")
    s.set_defaults(func=cmd_ics)

    s = sub.add_parser("evolve", parents=[common], help="evolve an electron distribution")
    s.add_argument("--init", choices=("mj", "mb", "gauss"), required=True)
    s.add_argument("--theta-in", type=float, help="initial temperature for mj/mb")
    s.add_argument("--mu-center", type=float, help="pulse centre for gauss")
    s.add_argument("--width", type=float, help="pulse width for gauss (default 0.1 * centre)")
    s.add_argument("--theta-eq", type=float, required=True)
    s.add_argument("--tau-end", type=float, required=True)
    s.add_argument("--snapshots", type=int, default=1)
    s.add_argument("--method", choices=("fp", "characteristics"), default="fp")
    s.add_argument("--drag", choices=("thompson", "model"), default="thompson")
    s.add_argument("--cells", type=int, default=400)
    s.add_argument("--no-diffusion", action="store_true", help="drop the diffusion term (fp only)")
    s.set_defaults(func=cmd_evolve)

    s = sub.add_parser("scenarios", parents=[common], help="table of reference scenarios")
    s.set_defaults(func=cmd_scenarios)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        columns, rows, ok = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"lightpressure {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, StepControlError, FloatingPointError) as exc:
        print(f"lightpressure {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    text = render(columns, rows, _meta(args), args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not ok:
        print(f"lightpressure {args.command}: some quadratures did not converge", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK
