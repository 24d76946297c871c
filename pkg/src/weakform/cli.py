"""Command-line front end.

Subcommands: solve, convergence, energy, boundary-map. All take --config
pointing at a TOML file (see config module) and --out for the output
directory. Exit codes: 0 success, 2 validation, 3 exceptional horizon,
4 numerical failure, 5 invariant violation. WEAKFORM_LOG sets verbosity.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys as _sys

import numpy as np

from .basis import bernstein_basis, damped_wave_basis
from .config import RunConfig, load_config
from .diagnostics import convergence_sweep, error_report, verify_projection_identity
from .energy import dissipation_audit
from .errors import (
    ExceptionalHorizonError,
    InvariantViolationError,
    NumericalError,
    ValidationError,
    WeakformError,
)
from .galerkin import EXCEPTIONAL_TOL, boundary_map, is_exceptional, solve_weak
from .mdof import mdof_ode_residual, mdof_solve
from .model import InitialConditions, Trajectory
from .oracle import duhamel_solve

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_EXCEPTIONAL = 3
EXIT_NUMERICAL = 4
EXIT_INVARIANT = 5

# drop below this before monotonicity stops being meaningful
ROUNDOFF_FLOOR = 1e-12

log = logging.getLogger("weakform.cli")


def _setup_logging():
    level_name = os.environ.get("WEAKFORM_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", force=False
    )
    logging.getLogger("weakform").setLevel(level)


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_csv(path: str, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])


def _write_json(path: str, payload: dict):
    def default(o):
        if isinstance(o, (np.floating, np.integer)):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        raise TypeError(f"not serializable: {type(o)}")

    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=default)
        fh.write("\n")


def _make_basis(cfg: RunConfig, sys_obj):
    if cfg.basis_family == "bernstein":
        return bernstein_basis(sys_obj.t_bar, cfg.degree,
                               orthonormalize=cfg.orthonormalize,
                               c=sys_obj.c if cfg.orthonormalize else None)
    return damped_wave_basis(sys_obj.t_bar, sys_obj.c, max(cfg.degree - 1, 1))


def _grid(cfg: RunConfig, args) -> np.ndarray:
    n = args.grid if args.grid else cfg.grid_points
    if n < 2:
        raise ValidationError("--grid must be at least 2")
    return np.linspace(0.0, cfg.t_bar, int(n))


def _tol(args) -> float:
    return args.tol if args.tol is not None else EXCEPTIONAL_TOL


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    grid = _grid(cfg, args)

    if cfg.kind == "sdof":
        basis = _make_basis(cfg, cfg.system)
        sol = solve_weak(cfg.system, basis, cfg.excitation, cfg.ic,
                         exceptional_tol=_tol(args))
        orac = duhamel_solve(cfg.system, cfg.excitation, cfg.ic, grid)
        xw, vw = sol.eval(grid)
        abs_err = np.abs(xw - orac.x)
        rows = list(zip(grid.tolist(), xw.tolist(), vw.tolist(),
                        orac.x.tolist(), orac.v.tolist(), abs_err.tolist()))
        _write_csv(os.path.join(outdir, cfg.path("trajectory", "trajectory.csv")),
                   ["t", "x_weak", "v_weak", "x_oracle", "v_oracle", "abs_err"], rows)
        rep = error_report(cfg.system, basis, cfg.excitation, cfg.ic, sol)
        payload = rep.to_dict()
        payload.update({
            "x_T_bar": sol.xT,
            "max_abs_err_grid": float(np.max(abs_err)),
            "projection_identity_residual": verify_projection_identity(
                cfg.system, basis, cfg.excitation, sol),
            "basis_id": sol.basis_id,
        })
        _write_json(os.path.join(outdir, cfg.path("diagnostics", "diagnostics.json")),
                    payload)
        log.info("solve finished, max grid error %.3e", payload["max_abs_err_grid"])
        return EXIT_OK

    sol_w = mdof_solve(cfg.system, cfg.excitation, cfg.ic, grid,
                       engine=("weak", cfg.degree))
    sol_o = mdof_solve(cfg.system, cfg.excitation, cfg.ic, grid, engine="oracle")
    per_dof_err = []
    for d in range(cfg.system.n_dof):
        tw, to = sol_w.trajectories[d], sol_o.trajectories[d]
        abs_err = np.abs(tw.x - to.x)
        per_dof_err.append(float(np.max(abs_err)))
        rows = list(zip(grid.tolist(), tw.x.tolist(), tw.v.tolist(),
                        to.x.tolist(), to.v.tolist(), abs_err.tolist()))
        _write_csv(
            os.path.join(outdir, cfg.path(f"trajectory_dof{d}", f"trajectory_dof{d}.csv")),
            ["t", "x_weak", "v_weak", "x_oracle", "v_oracle", "abs_err"], rows)
    payload = {
        "omegas": sol_w.modal.omegas,
        "xi": sol_w.modal.xi,
        "max_abs_err_per_dof": per_dof_err,
        "ode_residual_weak": mdof_ode_residual(cfg.system, cfg.excitation, sol_w),
        "ode_residual_oracle": mdof_ode_residual(cfg.system, cfg.excitation, sol_o),
    }
    _write_json(os.path.join(outdir, cfg.path("diagnostics", "diagnostics.json")), payload)
    return EXIT_OK


def _parse_degrees(spec: str):
    try:
        degrees = [int(p) for p in spec.replace(" ", "").split(",") if p]
    except ValueError as exc:
        raise ValidationError(f"--degrees must be a comma list of integers: {exc}") from exc
    if len(degrees) < 2:
        raise ValidationError("convergence needs at least 2 degrees")
    return degrees


def cmd_convergence(args) -> int:
    cfg = load_config(args.config)
    if cfg.kind != "sdof":
        raise ValidationError("convergence runs on sdof configs only")
    degrees = _parse_degrees(args.degrees)
    os.makedirs(args.out, exist_ok=True)
    rows = convergence_sweep(cfg.system, cfg.excitation, cfg.ic, degrees,
                             orthonormalize=cfg.orthonormalize)
    header = ["degree", "x_err_linf", "x_err_l2", "v_err_l2", "F_er_l2",
              "theta_nh_max", "theta_h_max", "ratio_H1_over_Fer"]
    table = [[r["degree"]] + [float(r[h]) for h in header[1:]] for r in rows]
    _write_csv(os.path.join(args.out, cfg.path("convergence", "convergence.csv")),
               header, table)
    errs = [r["x_err_linf"] for r in rows]
    for a, b in zip(errs, errs[1:]):
        if b >= a and b > ROUNDOFF_FLOOR:
            raise InvariantViolationError(
                f"x_err_linf failed to decrease: {a:.3e} -> {b:.3e}"
            )
    return EXIT_OK


def cmd_energy(args) -> int:
    cfg = load_config(args.config)
    if cfg.kind != "sdof":
        raise ValidationError("energy audit runs on sdof configs only")
    os.makedirs(args.out, exist_ok=True)
    n = args.grid if args.grid else max(cfg.grid_points, 2001)
    grid = np.linspace(0.0, cfg.t_bar, int(n))
    # audit the reference dynamics; discretization error is the solve
    # command's concern, not an energy-law violation
    traj = duhamel_solve(cfg.system, cfg.excitation, cfg.ic, grid)
    if args.inject_corruption:
        traj = Trajectory(traj.t, traj.x + 0.1 * np.sin(5.0 * traj.t), traj.v)
    audit = dissipation_audit(cfg.system, cfg.excitation, traj)
    scale = max(abs(audit.h0), abs(audit.hT), 1.0)
    checks = {
        "dissipation_inequality": {
            "value": audit.dissipation_margin,
            "passed": bool(audit.dissipation_margin >= -1e-9 * max(abs(audit.dissipation_rhs), 1.0)),
        },
        "pointwise_balance": {
            "value": audit.balance_residual,
            "tol": 1e-6 * scale,
            "passed": bool(audit.balance_residual < 1e-6 * scale),
        },
    }
    if cfg.system.c == 0.0 and cfg.excitation.is_zero():
        drift = abs(audit.hT - audit.h0) / max(abs(audit.h0), 1e-300)
        checks["conservation_drift"] = {
            "value": drift, "tol": 1e-9, "passed": bool(drift < 1e-9),
        }
    passed = all(c["passed"] for c in checks.values())
    payload = {
        "h0": audit.h0,
        "hT": audit.hT,
        "conservation_lhs": audit.conservation_lhs,
        "conservation_rhs": audit.conservation_rhs,
        "dissipation_lhs": audit.dissipation_lhs,
        "dissipation_rhs": audit.dissipation_rhs,
        "law_residual": audit.law_residual,
        "balance_residual": audit.balance_residual,
        "checks": checks,
        "passed": passed,
    }
    _write_json(os.path.join(args.out, cfg.path("energy", "energy.json")), payload)
    if not passed:
        raise InvariantViolationError(
            "energy audit failed: "
            + ", ".join(k for k, v in checks.items() if not v["passed"])
        )
    return EXIT_OK


def cmd_boundary_map(args) -> int:
    cfg = load_config(args.config)
    if cfg.kind != "sdof":
        raise ValidationError("boundary-map runs on sdof configs only")
    os.makedirs(args.out, exist_ok=True)
    sys_obj, f, ic = cfg.system, cfg.excitation, cfg.ic
    check = is_exceptional(sys_obj, _tol(args))
    bm = boundary_map(sys_obj, f, ic.x0, mode="analytic", strict=False)
    basis = _make_basis(cfg, sys_obj)
    payload = {
        "alpha_analytic": bm.alpha,
        "beta_analytic": bm.beta,
        "is_exceptional": bool(check.is_exceptional),
        "distance": check.distance,
        "sin_abs": check.sin_abs,
    }
    if not check.is_exceptional:
        gm = boundary_map(sys_obj, f, ic.x0, mode="galerkin", basis=basis,
                          tol=_tol(args))
        probes = np.array([-1.0, 0.0, 1.0])
        ends = np.array([
            duhamel_solve(sys_obj, f, InitialConditions(ic.x0, float(v)),
                          np.array([sys_obj.t_bar])).x[-1]
            for v in probes
        ])
        fitted = bm.alpha * probes + bm.beta
        payload.update({
            "alpha_galerkin": gm.alpha,
            "beta_galerkin": gm.beta,
            "collinearity_residual": float(np.max(np.abs(ends - fitted))),
        })
    _write_json(os.path.join(args.out, cfg.path("boundary", "boundary_map.json")),
                payload)
    if check.is_exceptional:
        raise ExceptionalHorizonError(
            f"t_bar = {sys_obj.t_bar} lies on the exceptional set "
            f"(|sin(omega_d t_bar)| = {check.sin_abs:.3e})",
            t_bar=sys_obj.t_bar, distance=check.distance,
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakform",
        description="Weak-form solver for damped oscillator initial value problems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="TOML problem description")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--grid", type=int, default=None, help="output grid points")
        p.add_argument("--tol", type=float, default=None,
                       help="exceptional-horizon tolerance")

    p_solve = sub.add_parser("solve", help="solve and compare against the oracle")
    common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_conv = sub.add_parser("convergence", help="degree sweep with error table")
    common(p_conv)
    p_conv.add_argument("--degrees", default="4,8,16,32",
                        help="comma-separated Bernstein degrees")
    p_conv.set_defaults(func=cmd_convergence)

    p_energy = sub.add_parser("energy", help="energy conservation/dissipation audit")
    common(p_energy)
    p_energy.add_argument("--inject-corruption", action="store_true",
                          help=argparse.SUPPRESS)
    p_energy.set_defaults(func=cmd_energy)

    p_bm = sub.add_parser("boundary-map", help="initial-velocity-to-endpoint map")
    common(p_bm)
    p_bm.set_defaults(func=cmd_boundary_map)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ExceptionalHorizonError as exc:
        msg = str(exc)
        if exc.suggestion is not None and "try t_bar" not in msg:
            msg += f" (try t_bar near {exc.suggestion:.6g})"
        print(f"error: {msg}", file=_sys.stderr)
        return EXIT_EXCEPTIONAL
    except ValidationError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_VALIDATION
    except InvariantViolationError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_INVARIANT
    except NumericalError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_NUMERICAL
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_VALIDATION
    except WeakformError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
