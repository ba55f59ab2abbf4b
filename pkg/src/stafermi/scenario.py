"""Scenario configs, the design->integrate->observe pipeline, and batches.

A scenario is one JSON document (see the presets for the schema).  Running
it produces a trajectory CSV and a summary JSON, both fully deterministic:
re-running an identical config reproduces the files byte for byte, and
batch results do not depend on the degree of parallelism.
"""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import _kernel
from .constants import LI6_MASS, hz_to_rad, rad_to_hz
from .drives import (DriveSchedule, adiabatic_reference_trajectory,
                     feasibility_check, lcd_anisotropic_unitary,
                     lcd_noninteracting, lcd_viscous_unitary, reference_drive)
from .engine import (IntegratorConfig, hold_continuation,
                     integrate_noninteracting, integrate_unitary,
                     integrate_viscous, tof_continuation)
from .errors import StaError
from .model import (AxisTriple, GasSpec, Regime, StrokeSpec, Trajectory,
                    validate_spec)
from .numerics import fd_derivative_uniform, hermite_eval
from .observables import trajectory_observables
from .presets import fermi_energy_joules, preset_config
from .schedules import (adiabatic_reference, smoothstep_frequency,
                        smoothstep_scale_path)

DRIVE_KINDS = ("reference", "lcd", "lcd-viscous", "table")
POST_ACTIONS = ("none", "hold", "tof")

_CSV_COLUMNS = (
    "t,b_x,b_y,b_z,bdot_x,bdot_y,bdot_z,"
    "omega2_x,omega2_y,omega2_z,q_star,mean_energy,mean_work,"
    "sigma_x_m,sigma_y_m,sigma_z_m,ratio_z_x,ratio_r_z,"
    "cq,stress_xx,stress_yy,stress_zz"
)


@dataclass(frozen=True)
class Scenario:
    """A fully resolved run description; `config` is its canonical form."""

    name: str
    stroke: StrokeSpec
    gas: GasSpec
    drive_kind: str
    drive_table: str | None
    post_action: str
    post_duration: float
    samples: int
    post_samples: int
    rel_tol: float
    abs_tol: float
    sweep: dict | None
    out_dir: str | None
    config: dict


def _require(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise ValueError(f"scenario config is missing '{key}' in {where}")
    return cfg[key]


def parse_scenario(cfg: dict) -> Scenario:
    """Validate and resolve a raw config dict into a Scenario."""
    name = str(_require(cfg, "name", "top level"))
    if not name or any(c in name for c in "/\\ \t"):
        raise ValueError(f"scenario name {name!r} must be a file-safe token")

    sc = _require(cfg, "stroke", "top level")
    tau = float(_require(sc, "tau_s", "stroke"))
    has_b = "target_b" in sc
    has_w = "target_omega_hz" in sc
    if has_b == has_w:
        raise ValueError("stroke needs exactly one of target_b / target_omega_hz")
    stroke = StrokeSpec.from_hz(
        _require(sc, "omega0_hz", "stroke"), tau,
        target_b=sc.get("target_b"), target_omega_hz=sc.get("target_omega_hz"))

    gc = _require(cfg, "gas", "top level")
    regime = Regime(str(_require(gc, "regime", "gas")))
    if "energy_j" in gc:
        energy = float(gc["energy_j"])
    else:
        ef = fermi_energy_joules(float(gc.get("fermi_temperature_uk", 6.5)))
        energy = float(_require(gc, "energy_ef_units", "gas")) * ef
    gas = GasSpec(
        regime=regime,
        initial_energy=energy,
        mass=float(gc.get("mass_kg", LI6_MASS)),
        initial_msq_sizes=(AxisTriple.of(gc["msq_sizes_m2"])
                           if "msq_sizes_m2" in gc else None),
        alpha_s=float(gc.get("alpha_s", 0.0)),
        virial_denominator=(float(gc["virial_denominator_j"])
                            if "virial_denominator_j" in gc else None),
    )
    validate_spec(stroke, gas)
    gas = gas.resolve(stroke)

    drive_cfg = cfg.get("drive", "reference")
    if isinstance(drive_cfg, str):
        drive_kind, drive_table = drive_cfg, None
    else:
        drive_kind = str(_require(drive_cfg, "kind", "drive"))
        drive_table = drive_cfg.get("path")
    if drive_kind not in DRIVE_KINDS:
        raise ValueError(f"unknown drive kind {drive_kind!r}; "
                         f"expected one of {DRIVE_KINDS}")
    if drive_kind == "table" and not drive_table:
        raise ValueError("table drive needs a 'path'")

    post = cfg.get("post", {"action": "none"})
    post_action = str(post.get("action", "none"))
    if post_action not in POST_ACTIONS:
        raise ValueError(f"unknown post action {post_action!r}")
    post_duration = float(post.get("duration_s", 0.0))
    if post_action != "none" and post_duration <= 0.0:
        raise ValueError("post action needs a positive duration_s")

    out = cfg.get("output", {})
    samples = int(out.get("samples", 201))
    out_dir = out.get("dir")
    post_samples = int(post.get("samples", samples))

    integ = cfg.get("integrator", {})
    rel_tol = float(integ.get("rel_tol", 1e-9))
    abs_tol = float(integ.get("abs_tol", 1e-12))

    sweep = cfg.get("sweep")
    if sweep is not None:
        if not isinstance(sweep, dict) or not sweep:
            raise ValueError("sweep must be a non-empty mapping")
        for key, valuelist in sweep.items():
            if key not in ("alpha_s", "tau_s", "target_b"):
                raise ValueError(f"unsupported sweep axis {key!r}")
            if not isinstance(valuelist, (list, tuple)) or not valuelist:
                raise ValueError(f"sweep list for {key!r} must be non-empty")

    resolved = {
        "name": name,
        "stroke": {
            "omega0_hz": [rad_to_hz(w) for w in stroke.omega0],
            "target_b": list(stroke.target_b),
            "tau_s": stroke.tau,
        },
        "gas": {
            "regime": gas.regime.value,
            "energy_j": gas.initial_energy,
            "mass_kg": gas.mass,
            "msq_sizes_m2": list(gas.initial_msq_sizes),
            "alpha_s": gas.alpha_s,
            "virial_denominator_j": gas.virial_denominator,
        },
        "drive": ({"kind": drive_kind, "path": drive_table}
                  if drive_table else drive_kind),
        "post": {"action": post_action, "duration_s": post_duration,
                 "samples": post_samples},
        "output": ({"samples": samples} if out_dir is None
                   else {"samples": samples, "dir": out_dir}),
        "integrator": {"rel_tol": rel_tol, "abs_tol": abs_tol},
    }
    if sweep is not None:
        resolved["sweep"] = {k: list(v) for k, v in sweep.items()}
    if "labels" in cfg:
        resolved["labels"] = dict(cfg["labels"])

    return Scenario(name=name, stroke=stroke, gas=gas,
                    drive_kind=drive_kind, drive_table=drive_table,
                    post_action=post_action, post_duration=post_duration,
                    samples=samples, post_samples=post_samples,
                    rel_tol=rel_tol, abs_tol=abs_tol,
                    sweep=(None if sweep is None
                           else {k: list(v) for k, v in sweep.items()}),
                    out_dir=out_dir, config=resolved)


def load_scenario(source: str) -> Scenario:
    """Load from a JSON file path or a 'preset:<name>' reference."""
    if source.startswith("preset:"):
        return parse_scenario(preset_config(source[len("preset:"):]))
    with open(source, "r", encoding="utf-8") as fh:
        return parse_scenario(json.load(fh))


def table_drive_from_csv(path: str, tau: float) -> DriveSchedule:
    """Custom drive table: CSV columns t_s, omega2_x, omega2_y, omega2_z
    on a uniform grid covering [0, tau]."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line[0].isalpha():
                continue
            rows.append([float(v) for v in line.split(",")])
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 4 or arr.shape[0] < 5:
        raise ValueError("drive table needs >= 5 rows of t,omega2_x,omega2_y,omega2_z")
    t = arr[:, 0]
    h = t[1] - t[0]
    if not np.allclose(np.diff(t), h, rtol=1e-9, atol=0.0):
        raise ValueError("drive table must be on a uniform time grid")
    if t[0] > 0.0 or t[-1] < tau:
        raise ValueError(f"drive table [{t[0]}, {t[-1]}] must cover [0, {tau}]")
    vals = np.ascontiguousarray(arr[:, 1:4].T)
    ders = np.ascontiguousarray(fd_derivative_uniform(arr[:, 1:4], h).T)
    t0 = float(t[0])

    def fn(tt):
        return hermite_eval(t0, h, vals, ders, tt)

    return DriveSchedule(kind="table", tau=float(tau), _fn=fn,
                         table=(t0, float(t[-1]), vals, ders))


def build_drive(scenario: Scenario):
    """(FrequencySchedule, DriveSchedule) for the scenario's stroke."""
    schedule = smoothstep_frequency(scenario.stroke)
    kind = scenario.drive_kind
    if kind == "reference":
        drive = reference_drive(schedule)
    elif kind == "lcd":
        if scenario.gas.regime is Regime.NONINTERACTING:
            drive = lcd_noninteracting(schedule,
                                       smoothstep_scale_path(scenario.stroke))
        else:
            drive = lcd_anisotropic_unitary(schedule)
    elif kind == "lcd-viscous":
        ref = adiabatic_reference_trajectory(schedule, scenario.gas)
        drive = lcd_viscous_unitary(schedule, scenario.gas, ref)
    else:
        drive = table_drive_from_csv(scenario.drive_table, scenario.stroke.tau)
    return schedule, drive


def _integrate(scenario: Scenario, drive: DriveSchedule) -> Trajectory:
    cfg = IntegratorConfig(rel_tol=scenario.rel_tol, abs_tol=scenario.abs_tol,
                           output_grid=scenario.samples)
    regime = scenario.gas.regime
    if regime is Regime.NONINTERACTING:
        traj = integrate_noninteracting(drive, scenario.stroke, cfg,
                                        gas=scenario.gas)
    elif regime is Regime.UNITARY:
        traj = integrate_unitary(drive, scenario.stroke, cfg, gas=scenario.gas)
    else:
        traj = integrate_viscous(drive, scenario.stroke, scenario.gas, cfg)
    if scenario.post_action != "none":
        post_cfg = IntegratorConfig(rel_tol=scenario.rel_tol,
                                    abs_tol=scenario.abs_tol,
                                    output_grid=scenario.post_samples)
        if scenario.post_action == "tof":
            traj = tof_continuation(traj, scenario.gas,
                                    scenario.post_duration, post_cfg)
        else:
            traj = hold_continuation(traj, scenario.gas,
                                     scenario.post_duration, cfg=post_cfg)
    return traj


def _fmt(v: float) -> str:
    return repr(float(v))


def write_trajectory_csv(path: str, traj: Trajectory, obs: dict,
                         config: dict) -> None:
    stress = obs["stress"]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# stafermi trajectory v1\n")
        fh.write("# config = "
                 + json.dumps(config, sort_keys=True, separators=(",", ":"))
                 + "\n")
        fh.write(_CSV_COLUMNS + "\n")
        for i in range(len(traj)):
            row = [traj.t[i],
                   traj.b[i, 0], traj.b[i, 1], traj.b[i, 2],
                   traj.bdot[i, 0], traj.bdot[i, 1], traj.bdot[i, 2],
                   traj.drive_omega2[i, 0], traj.drive_omega2[i, 1],
                   traj.drive_omega2[i, 2],
                   obs["q_star"][i], obs["mean_energy"][i],
                   obs["mean_work"][i],
                   obs["sizes"][i, 0], obs["sizes"][i, 1], obs["sizes"][i, 2],
                   obs["ratio_z_x"][i], obs["ratio_r_z"][i],
                   obs["cq"][i], stress[i, 0], stress[i, 1], stress[i, 2]]
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _summarize(scenario: Scenario, traj: Trajectory, obs: dict,
               schedule, drive: DriveSchedule) -> dict:
    tau = scenario.stroke.tau
    itau = traj.index_at(tau)
    ilast = len(traj) - 1
    w0 = scenario.stroke.omega0.as_array()
    report = feasibility_check(drive)
    om2 = traj.drive_omega2
    summary = {
        "name": scenario.name,
        "kernel_backend": _kernel.BACKEND,
        "config": scenario.config,
        "nominal_b_tau": list(scenario.stroke.target_b),
        "b_tau": [float(v) for v in traj.b[itau]],
        "bdot_tau_over_omega0": [float(v) for v in traj.bdot[itau] / w0],
        "q_star_tau": float(obs["q_star"][itau]),
        "mean_work_tau": float(obs["mean_work"][itau]),
        "ratio_z_x_tau": float(obs["ratio_z_x"][itau]),
        "ratio_r_z_tau": float(obs["ratio_r_z"][itau]),
        "cq_tau": float(traj.cq[itau]),
        "final_t_s": float(traj.t[ilast]),
        "final_b": [float(v) for v in traj.b[ilast]],
        "final_q_star": float(obs["q_star"][ilast]),
        "final_ratio_r_z": float(obs["ratio_r_z"][ilast]),
        "final_cq": float(traj.cq[ilast]),
        "feasibility": {
            "feasible": report.feasible,
            "min_omega2": list(report.min_omega2),
            "time_of_min": list(report.time_of_min),
            "negative_intervals": report.negative_intervals,
        },
        "omega2_min": [float(v) for v in om2.min(axis=0)],
        "omega2_max": [float(v) for v in om2.max(axis=0)],
        "steps": {k: int(traj.aux[k]) for k in ("naccept", "nreject", "nfev")
                  if k in traj.aux},
    }
    if scenario.gas.regime is not Regime.NONINTERACTING:
        path = adiabatic_reference(schedule)
        summary["adiabatic_b_tau"] = [float(v) for v in path.b(tau)]
    return summary


def run_scenario(scenario: Scenario, out_dir: str = "sta-out") -> dict:
    """Execute the full pipeline; write artifacts; return the summary."""
    os.makedirs(out_dir, exist_ok=True)
    schedule, drive = build_drive(scenario)
    traj = _integrate(scenario, drive)
    obs = trajectory_observables(traj, schedule)
    summary = _summarize(scenario, traj, obs, schedule, drive)
    csv_path = os.path.join(out_dir, f"{scenario.name}__trajectory.csv")
    json_path = os.path.join(out_dir, f"{scenario.name}__summary.json")
    write_trajectory_csv(csv_path, traj, obs, scenario.config)
    summary["files"] = [os.path.basename(csv_path),
                        os.path.basename(json_path)]
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _sweep_token(key: str, value) -> str:
    if isinstance(value, (list, tuple)):
        return f"{key}=" + "-".join(f"{float(v):g}" for v in value)
    return f"{key}={float(value):g}"


def expand_sweep(scenario: Scenario) -> list[Scenario]:
    """Cartesian expansion over the sweep axes, preserving list order."""
    if not scenario.sweep:
        return [scenario]
    keys = list(scenario.sweep.keys())
    out = []
    for combo in itertools.product(*(scenario.sweep[k] for k in keys)):
        cfg = json.loads(json.dumps(scenario.config))
        cfg.pop("sweep", None)
        tokens = []
        for key, value in zip(keys, combo):
            cfg = _merge_sweep(cfg, key, value)
            tokens.append(_sweep_token(key, value))
        cfg["name"] = scenario.name + "__" + "__".join(tokens)
        out.append(parse_scenario(cfg))
    return out


def _merge_sweep(cfg: dict, key: str, value) -> dict:
    if key == "alpha_s":
        cfg["gas"]["alpha_s"] = float(value)
    elif key == "tau_s":
        cfg["stroke"]["tau_s"] = float(value)
    elif key == "target_b":
        cfg["stroke"]["target_b"] = (list(map(float, value))
                                     if isinstance(value, (list, tuple))
                                     else [float(value)] * 3)
        cfg["stroke"].pop("target_omega_hz", None)
    return cfg


def _write_sweep_csv(scenario: Scenario, children: list[Scenario],
                     summaries: list[dict], out_dir: str) -> str:
    keys = list(scenario.sweep.keys())
    sweep_csv = os.path.join(out_dir, f"{scenario.name}__sweep.csv")
    with open(sweep_csv, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# stafermi sweep v1\n")
        fh.write("# config = "
                 + json.dumps(scenario.config, sort_keys=True,
                              separators=(",", ":")) + "\n")
        fh.write(",".join(keys)
                 + ",q_star_tau,mean_work_tau,final_b_x,final_b_y,final_b_z,"
                 "final_ratio_r_z,final_cq\n")
        for child, summary in zip(children, summaries):
            cells = []
            for key in keys:
                if key == "alpha_s":
                    cells.append(_fmt(child.gas.alpha_s))
                elif key == "tau_s":
                    cells.append(_fmt(child.stroke.tau))
                else:
                    cells.append(_fmt(child.stroke.target_b.x))
            cells += [_fmt(summary["q_star_tau"]),
                      _fmt(summary["mean_work_tau"]),
                      _fmt(summary["final_b"][0]),
                      _fmt(summary["final_b"][1]),
                      _fmt(summary["final_b"][2]),
                      _fmt(summary["final_ratio_r_z"]),
                      _fmt(summary["final_cq"])]
            fh.write(",".join(cells) + "\n")
    return sweep_csv


def run_sweep(scenario: Scenario, out_dir: str = "sta-out",
              parallelism: int = 1) -> list[dict]:
    """Run every sweep point and write a per-point summary table."""
    if not scenario.sweep:
        raise ValueError(f"scenario {scenario.name!r} has no sweep axes")
    os.makedirs(out_dir, exist_ok=True)
    children = expand_sweep(scenario)
    summaries = _run_many(children, parallelism, out_dir)
    for summary in summaries:
        if isinstance(summary, Exception):
            raise summary
    _write_sweep_csv(scenario, children, summaries, out_dir)
    return summaries


def _scenario_task(args):
    scenario, out_dir = args
    try:
        return run_scenario(scenario, out_dir)
    except StaError as exc:  # keep worker results picklable
        return RuntimeError(f"{type(exc).__name__}: {exc}")


def _run_many(scenarios, parallelism: int, out_dir: str):
    tasks = [(s, out_dir) for s in scenarios]
    if parallelism <= 1 or len(tasks) <= 1:
        return [_scenario_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_scenario_task, tasks))


def run_batch(scenarios: list[Scenario], parallelism: int = 1,
              out_dir: str = "sta-out") -> dict:
    """Run many scenarios (expanding sweeps); never stops at a failure.

    Results are independent of ``parallelism``; the index file records
    per-scenario status in input order.
    """
    os.makedirs(out_dir, exist_ok=True)
    flat: list[Scenario] = []
    groups: list[tuple[Scenario, list[Scenario]]] = []
    seen = set()
    for scenario in scenarios:
        if scenario.name in seen:
            raise ValueError(f"duplicate scenario name {scenario.name!r}")
        seen.add(scenario.name)
        children = expand_sweep(scenario)
        groups.append((scenario, children))
        flat.extend(children)
    results = _run_many(flat, parallelism, out_dir)
    by_name = {child.name: res for child, res in zip(flat, results)}

    index = {"version": 1, "scenarios": []}
    for scenario, children in groups:
        entry = {"name": scenario.name, "status": "ok", "runs": []}
        for child in children:
            res = by_name[child.name]
            if isinstance(res, Exception):
                entry["status"] = "error"
                entry["runs"].append({"name": child.name, "status": "error",
                                      "error": str(res)})
            else:
                entry["runs"].append({"name": child.name, "status": "ok",
                                      "files": res["files"]})
        if scenario.sweep and entry["status"] == "ok":
            path = _write_sweep_csv(scenario, children,
                                    [by_name[c.name] for c in children],
                                    out_dir)
            entry["files"] = [os.path.basename(path)]
        index["scenarios"].append(entry)
    with open(os.path.join(out_dir, "batch_index.json"), "w",
              encoding="utf-8", newline="\n") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return index
