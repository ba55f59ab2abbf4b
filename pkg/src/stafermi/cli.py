"""Command-line front end.

    sta design <scenario>   emit the drive schedule table + feasibility
    sta run    <scenario>   full design -> integrate -> observe pipeline
    sta sweep  <scenario>   expand the scenario's sweep axes
    sta fit    <profile.csv>  Gaussian fit of a measured profile

<scenario> is a JSON file path or "preset:<name>".  Exit codes: 0 success,
1 invalid scenario or input file, 2 numerical failure (collapse, step
underflow, fit divergence).  The output directory resolves in order:
--out-dir flag, STA_OUT_DIR environment variable, the scenario's own
output.dir field, then ./sta-out.  No other environment coupling.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .drives import feasibility_check
from .errors import EngineError, FitDiverged, StaError
from .imaging import gaussian_fit, read_profile_csv
from .presets import PRESET_NAMES, preset_config
from .scenario import (Scenario, build_drive, parse_scenario, run_scenario,
                       run_sweep)

_ENV_OUT_DIR = "STA_OUT_DIR"


def _load_config(source: str) -> dict:
    if source.startswith("preset:"):
        return preset_config(source[len("preset:"):])
    with open(source, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _scenario_from_args(args) -> Scenario:
    cfg = _load_config(args.scenario)
    if args.rel_tol is not None or args.abs_tol is not None:
        integ = dict(cfg.get("integrator", {}))
        if args.rel_tol is not None:
            integ["rel_tol"] = args.rel_tol
        if args.abs_tol is not None:
            integ["abs_tol"] = args.abs_tol
        cfg = dict(cfg)
        cfg["integrator"] = integ
    return parse_scenario(cfg)


def _resolve_out_dir(args, scenario: Scenario | None = None) -> str:
    if args.out_dir:
        return args.out_dir
    env = os.environ.get(_ENV_OUT_DIR)
    if env:
        return env
    if scenario is not None and scenario.out_dir:
        return scenario.out_dir
    return "sta-out"


def _cmd_design(args) -> int:
    scenario = _scenario_from_args(args)
    out_dir = _resolve_out_dir(args, scenario)
    os.makedirs(out_dir, exist_ok=True)
    schedule, drive = build_drive(scenario)
    n = max(scenario.samples, 201)
    t = np.linspace(0.0, scenario.stroke.tau, n)
    omega = schedule.omega(t)
    om2 = drive.omega2(t)
    csv_path = os.path.join(out_dir, f"{scenario.name}__design.csv")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# stafermi design v1\n")
        fh.write("# config = "
                 + json.dumps(scenario.config, sort_keys=True,
                              separators=(",", ":")) + "\n")
        fh.write("t,omega_x,omega_y,omega_z,"
                 "drive_omega2_x,drive_omega2_y,drive_omega2_z\n")
        for i in range(n):
            row = [t[i], omega[i, 0], omega[i, 1], omega[i, 2],
                   om2[i, 0], om2[i, 1], om2[i, 2]]
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    report = feasibility_check(drive)
    summary = {
        "name": scenario.name,
        "config": scenario.config,
        "drive_kind": scenario.drive_kind,
        "feasibility": {
            "feasible": report.feasible,
            "min_omega2": list(report.min_omega2),
            "time_of_min": list(report.time_of_min),
            "negative_intervals": report.negative_intervals,
        },
        "files": [os.path.basename(csv_path)],
    }
    json_path = os.path.join(out_dir, f"{scenario.name}__design.json")
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json_path)
    return 0


def _cmd_run(args) -> int:
    scenario = _scenario_from_args(args)
    out_dir = _resolve_out_dir(args, scenario)
    summary = run_scenario(scenario, out_dir)
    print(os.path.join(out_dir, f"{scenario.name}__summary.json"))
    if not summary["feasibility"]["feasible"]:
        print("warning: drive demands an expulsive potential on some axis",
              file=sys.stderr)
    return 0


def _cmd_sweep(args) -> int:
    scenario = _scenario_from_args(args)
    out_dir = _resolve_out_dir(args, scenario)
    run_sweep(scenario, out_dir, parallelism=args.parallelism)
    print(os.path.join(out_dir, f"{scenario.name}__sweep.csv"))
    return 0


def _cmd_fit(args) -> int:
    profile = read_profile_csv(args.profile)
    fit = gaussian_fit(profile)
    payload = {
        "a0": fit.a0, "a1": fit.a1, "sigma": fit.sigma,
        "residual_norm": fit.residual_norm,
        "converged": fit.converged, "n_iter": fit.n_iter,
        "profile": os.path.basename(args.profile),
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out_dir or os.environ.get(_ENV_OUT_DIR):
        out_dir = _resolve_out_dir(args)
        os.makedirs(out_dir, exist_ok=True)
        stem = os.path.splitext(os.path.basename(args.profile))[0]
        with open(os.path.join(out_dir, f"{stem}__fit.json"), "w",
                  encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--out-dir", default=None,
                        help="output directory (default: $STA_OUT_DIR, the "
                             "scenario's output.dir, or ./sta-out)")
    common.add_argument("--rel-tol", type=float, default=None,
                        help="override the integrator relative tolerance")
    common.add_argument("--abs-tol", type=float, default=None,
                        help="override the integrator absolute tolerance")

    parser = argparse.ArgumentParser(
        prog="sta",
        description="Shortcut-to-adiabaticity expansion strokes for trapped "
                    "Fermi gases: drive design, scaling dynamics, and "
                    "synthetic imaging.",
        epilog="presets: " + ", ".join(f"preset:{n}" for n in PRESET_NAMES))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", parents=[common],
                       help="emit the drive schedule table and feasibility "
                            "report without integrating")
    p.add_argument("scenario", help="scenario JSON path or preset:<name>")
    p.set_defaults(fn=_cmd_design)

    p = sub.add_parser("run", parents=[common],
                       help="run the full pipeline for one scenario "
                            "(sweep axes, if any, are ignored)")
    p.add_argument("scenario", help="scenario JSON path or preset:<name>")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep", parents=[common],
                       help="expand and run the scenario's sweep axes")
    p.add_argument("scenario", help="scenario JSON path or preset:<name>")
    p.add_argument("--parallelism", type=int, default=1,
                   help="worker processes (results are identical at any "
                        "setting)")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("fit", parents=[common],
                       help="Gaussian fit of a two-column profile CSV")
    p.add_argument("profile", help="CSV with position_m,value columns")
    p.set_defaults(fn=_cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (EngineError, FitDiverged) as exc:
        print(f"sta: numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 2
    except (StaError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"sta: invalid input: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
