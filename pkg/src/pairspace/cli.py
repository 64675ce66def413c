"""Command-line interface.

Subcommands:
    simulate     integrate an initial-conditions file, write CSV + report
    collinear    solve the collinear configuration for three masses
    equilateral  build and integrate the equilateral circular solution
    sweep        collinear reports over a mass-simplex x exponent grid
    verify       run the randomized identity suite

Exit codes: 0 success, 1 assertion/verification failure, 2 invalid
input, 3 runtime collision singularity.  Body indices are 1-based in all
output.  All randomized commands echo their seed and are reproducible.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .central import (
    collinear_property_violations,
    euler_alpha,
    lagrange_circular_states,
)
from .core import MassSystem, pairs_to_bodies
from .dynamics import IntegratorConfig, integrate, pair_period_estimates
from .errors import (
    CollisionError,
    ConstraintViolationError,
    PairSpaceError,
    ValidationError,
)
from .io import (
    SWEEP_COLUMNS,
    _fmt,
    collinear_report_dict,
    load_initial_conditions,
    write_body_trajectory_csv,
    write_json,
    write_trajectory_csv,
)
from .kinetics import PotentialLaw
from .oracle import integrate_bodies
from .threebody import (
    conservation_classifier,
    homothety_check,
    pair_angular_momenta,
    pair_energies,
)
from .verify import GROUPS, run_checks

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_SINGULARITY = 3


def _add_common_law(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=float, default=1.0, metavar="REAL",
                   help="potential exponent (default 1 = Newtonian)")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", type=Path, default=Path("."), metavar="DIR",
                   help="directory for output files (default: cwd)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="trajectory format for simulate/equilateral")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairspace",
        description="Pair-coordinate N-body simulation and "
        "central-configuration analysis.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate an initial-conditions file")
    p.add_argument("--input", type=Path, required=True,
                   help="initial conditions JSON")
    _add_common_law(p)
    p.add_argument("--t-end", type=float, default=None,
                   help="final time (default: 10 shortest pair periods)")
    p.add_argument("--dt", type=float, default=None,
                   help="step size (default: 1e-3 shortest pair period)")
    p.add_argument("--monitor-every", type=int, default=10)
    p.add_argument("--cross-check", action="store_true",
                   help="also run the body-coordinate integrator and "
                   "report the worst position discrepancy")
    _add_output(p)

    p = sub.add_parser("collinear", help="solve the collinear configuration")
    p.add_argument("masses", type=float, nargs=3, metavar="M")
    _add_common_law(p)
    p.add_argument("--output", type=Path, default=None, metavar="DIR",
                   help="also write report JSON here")

    p = sub.add_parser("equilateral",
                       help="build and integrate the equilateral solution")
    p.add_argument("masses", type=float, nargs=3, metavar="M")
    _add_common_law(p)
    p.add_argument("--distance", type=float, default=1.0,
                   help="side length of the triangle (default 1)")
    p.add_argument("--periods", type=float, default=5.0,
                   help="how many rotation periods to integrate (default 5)")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--monitor-every", type=int, default=10)
    p.add_argument("--cross-check", action="store_true")
    _add_output(p)

    p = sub.add_parser("sweep", help="collinear reports over a mass grid")
    p.add_argument("--grid", type=int, default=30, metavar="K",
                   help="simplex subdivisions; interior points only "
                   "(default 30, i.e. 406 points)")
    p.add_argument("--n-values", type=str, default="0.5,1,2,3",
                   help="comma-separated exponents (default 0.5,1,2,3)")
    _add_output(p)

    p = sub.add_parser("verify", help="run the randomized identity suite")
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--only", choices=GROUPS, default=None,
                   help="restrict to one check group")
    return parser


def _simplex_grid(k: int):
    """Interior integer-barycentric mass triples (i+j+l = k)."""
    for i in range(1, k - 1):
        for j in range(1, k - i):
            l = k - i - j
            if l >= 1:
                yield (i / k, j / k, l / k)


def _positive_masses(values) -> MassSystem:
    try:
        return MassSystem(values)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _law_from(args) -> PotentialLaw:
    try:
        return PotentialLaw(args.n)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _cross_check(traj, ms, law, dt):
    """Worst per-sample body-position gap between formulations.

    Returns the gap and the oracle trajectory it was measured against.
    """
    bodies0 = pairs_to_bodies(traj.samples[0].state, ms)
    cfg = IntegratorConfig(
        dt=dt, t_end=traj.samples[-1].time, monitor_every=1
    )
    oracle = integrate_bodies(bodies0, ms, law, cfg)
    by_time = {round(s.time, 12): s for s in oracle.samples}
    scale = max(
        np.abs(s.state.r).max() for s in oracle.samples
    )
    worst = 0.0
    for s in traj.samples:
        ref = by_time.get(round(s.time, 12))
        if ref is None:
            continue
        r = pairs_to_bodies(s.state, ms, tol_triangle=1e-3).r
        worst = max(worst, float(np.abs(r - ref.state.r).max()) / scale)
    return worst, oracle


def _threebody_diagnostics(traj, ms, law) -> dict:
    """Per-sample pair energies, angular momenta, torques, and verdicts."""
    rows = []
    for s in traj.samples:
        e = pair_energies(s.state, ms, law)
        L = pair_angular_momenta(s.state, ms, law)
        rows.append({
            "t": s.time,
            "e12": e.e12, "e23": e.e23, "e31": e.e31, "E_pair": e.total,
            "L12": L.L12.tolist(), "L23": L.L23.tolist(), "L31": L.L31.tolist(),
            "torque12": L.torque12.tolist(),
            "torque23": L.torque23.tolist(),
            "torque31": L.torque31.tolist(),
        })
    out = {"samples": rows}
    if len(traj.samples) >= 10:
        out["angular_momentum_conservation"] = conservation_classifier(traj, ms)
        fit = homothety_check(traj)
        out["homothetic"] = fit.is_homothetic
        out["homothety_max_residual"] = fit.max_residual
    return out


def _report_trajectory(traj, ms, law, args, label: str) -> int:
    outdir = args.output
    outdir.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        write_trajectory_csv(traj, ms, outdir / f"{label}_trajectory.csv")
    else:
        rows = []
        for s in traj.samples:
            rows.append({
                "t": s.time,
                "E_pair": s.diagnostics.pair_energy,
                "tri_residual": s.diagnostics.triangle_residual,
                "q": s.state.q.tolist(),
                "qdot": s.state.qdot.tolist(),
                "R": s.state.R.tolist(),
                "Rdot": s.state.Rdot.tolist(),
            })
        write_json({"samples": rows}, outdir / f"{label}_trajectory.json")

    e0 = traj.samples[0].diagnostics.pair_energy
    drift = max(abs(s.diagnostics.pair_energy - e0) for s in traj.samples)
    rel_drift = drift / max(abs(e0), 1e-300)
    max_res = max(s.diagnostics.triangle_residual for s in traj.samples)
    report = {
        "status": traj.status,
        "warnings": traj.warnings,
        "samples": len(traj.samples),
        "t_final": traj.samples[-1].time,
        "energy_drift_rel": rel_drift,
        "max_triangle_residual": max_res,
        "n": law.exponent,
        "masses": ms.masses.tolist(),
    }

    if ms.n_bodies == 3 and traj.samples:
        write_json(
            _threebody_diagnostics(traj, ms, law),
            outdir / f"{label}_threebody.json",
        )

    if getattr(args, "cross_check", False):
        gap, oracle_traj = _cross_check(traj, ms, law, args._dt_used)
        report["cross_check_max_position_gap"] = gap
        write_body_trajectory_csv(
            oracle_traj, ms, outdir / f"{label}_oracle_trajectory.csv"
        )
        print(f"cross-check max position discrepancy: {gap:.3e}")

    if traj.error is not None:
        report["error"] = str(traj.error)
    write_json(report, outdir / f"{label}_report.json")

    print(f"status: {traj.status}")
    print(f"samples: {len(traj.samples)}  t_final: {traj.samples[-1].time!r}")
    print(f"relative energy drift: {rel_drift:.3e}")
    print(f"max triangle residual: {max_res:.3e}")
    for w in traj.warnings:
        print(f"warning: {w}")
    if traj.error is not None:
        print(f"error: {traj.error}", file=sys.stderr)
        return EXIT_SINGULARITY
    return EXIT_OK


def cmd_simulate(args) -> int:
    law = _law_from(args)
    ms, state = load_initial_conditions(args.input)
    periods = pair_period_estimates(state, ms, law)
    dt = args.dt if args.dt is not None else 1e-3 * float(periods.min())
    t_end = args.t_end if args.t_end is not None else 10.0 * float(periods.min())
    if not dt > 0 or not t_end > state.time:
        raise ValidationError("dt must be positive and t-end after the start time")
    cfg = IntegratorConfig(dt=dt, t_end=t_end, monitor_every=args.monitor_every)
    args._dt_used = dt
    traj = integrate(state, ms, law, cfg)
    return _report_trajectory(traj, ms, law, args, "simulate")


def cmd_equilateral(args) -> int:
    law = _law_from(args)
    ms = _positive_masses(args.masses)
    if ms.n_bodies != 3:
        raise ValidationError("equilateral needs exactly three masses")
    state = lagrange_circular_states(ms, law, args.distance, [0.0])[0]
    period = float(pair_period_estimates(state, ms, law).min())
    dt = args.dt if args.dt is not None else 1e-3 * period
    cfg = IntegratorConfig(dt=dt, t_end=args.periods * period,
                           monitor_every=args.monitor_every)
    args._dt_used = dt
    traj = integrate(state, ms, law, cfg)

    d = np.array([s.state.separations() for s in traj.samples])
    spread = float(((d.max(axis=1) - d.min(axis=1)) / d.mean(axis=1)).max())
    print(f"distance spread (relative): {spread:.3e}")
    return _report_trajectory(traj, ms, law, args, "equilateral")


def cmd_collinear(args) -> int:
    law = _law_from(args)
    ms = _positive_masses(args.masses)
    if ms.n_bodies != 3:
        raise ValidationError("collinear needs exactly three masses")
    report = euler_alpha(ms, law)
    d = collinear_report_dict(report)
    print(f"alpha = {report.alpha!r}   (distance ratio q23/q12)")
    print(f"case {report.case_id}: alpha in "
          f"[{report.interval[0]!r}, {report.interval[1]!r}]")
    print(f"x_L = {report.x_L!r}")
    print("k    sigma_k               tau_k")
    for k in (1, 2, 3):
        print(f"{k}    {report.sigma[k]:<20.15g}  {report.tau[k]:<.15g}")
    if args.output is not None:
        args.output.mkdir(parents=True, exist_ok=True)
        write_json(d, args.output / "collinear_report.json")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        n_values = [float(v) for v in args.n_values.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"bad --n-values {args.n_values!r}") from None
    if not n_values or any(not v > 0 for v in n_values):
        raise ValidationError("sweep exponents must be positive")
    if args.grid < 3:
        raise ValidationError("--grid must be at least 3")

    outdir = args.output
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    violations = []
    for n in n_values:
        law = PotentialLaw(n)
        for m1, m2, m3 in _simplex_grid(args.grid):
            ms = MassSystem([m1, m2, m3])
            try:
                report = euler_alpha(ms, law)
            except PairSpaceError as exc:
                violations.append(
                    {"masses": [m1, m2, m3], "n": n, "error": str(exc)}
                )
                continue
            for problem in collinear_property_violations(report, ms, law):
                violations.append(
                    {"masses": [m1, m2, m3], "n": n, "error": problem}
                )
            d = collinear_report_dict(report)
            rows.append([_fmt(d[c]) if c != "case" else str(d[c])
                         for c in SWEEP_COLUMNS])
    with open(outdir / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        w.writerows(rows)
    write_json(
        {"rows": len(rows), "violations": violations},
        outdir / "sweep_report.json",
    )
    print(f"{len(rows)} grid points written, {len(violations)} violations")
    return EXIT_OK if not violations else EXIT_CHECK_FAILED


def cmd_verify(args) -> int:
    results = run_checks(seed=args.seed, cases=args.cases, only=args.only)
    for r in results:
        print(r.line())
    passed = sum(r.passed for r in results)
    print(f"seed {args.seed}: {passed}/{len(results)} checks passed")
    return EXIT_OK if passed == len(results) else EXIT_CHECK_FAILED


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": cmd_simulate,
        "collinear": cmd_collinear,
        "equilateral": cmd_equilateral,
        "sweep": cmd_sweep,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except (ValidationError, ConstraintViolationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except CollisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULARITY
    except PairSpaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
