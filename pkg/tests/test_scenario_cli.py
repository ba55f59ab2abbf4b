"""Scenario configs, artifact layout, batches, and the sta CLI."""

import json
import os

import numpy as np
import pytest

from stafermi import (expand_sweep, load_scenario, parse_scenario,
                      preset_config, run_batch, run_scenario, run_sweep)
from stafermi.cli import main
from stafermi.scenario import _CSV_COLUMNS


def _tiny_config(name="tiny", **over):
    cfg = {
        "name": name,
        "stroke": {"omega0_hz": [100.0, 100.0, 100.0],
                   "target_b": [1.0, 1.0, 1.0], "tau_s": 1e-4},
        "gas": {"regime": "noninteracting", "energy_ef_units": 0.75},
        "drive": "reference",
        "output": {"samples": 11},
    }
    cfg.update(over)
    return cfg


def _collapse_config(tmp_path, name="crush"):
    """A tabulated drive strong enough to squeeze the cloud into the
    collapse guard almost immediately."""
    table = tmp_path / "crush_table.csv"
    lines = ["t_s,omega2_x,omega2_y,omega2_z"]
    for i in range(9):
        t = 1e-7 * i / 8.0
        lines.append(f"{t!r},1e16,1e16,1e16")
    table.write_text("\n".join(lines) + "\n")
    return {
        "name": name,
        "stroke": {"omega0_hz": [1e-6, 1e-6, 1e-6],
                   "target_b": [1.0, 1.0, 1.0], "tau_s": 1e-7},
        "gas": {"regime": "noninteracting", "energy_ef_units": 0.75},
        "drive": {"kind": "table", "path": str(table)},
        "output": {"samples": 5},
    }


# ---------------------------------------------------------------- parsing


def test_parse_rejects_bad_configs():
    bad = [
        ({}, "missing 'name'"),
        ({"name": "a b c"}, "file-safe"),
        ({"name": "a/b"}, "file-safe"),
        (_tiny_config(stroke={"omega0_hz": [1, 1, 1], "tau_s": 1e-3}),
         "exactly one of"),
        (_tiny_config(stroke={"omega0_hz": [1, 1, 1], "tau_s": 1e-3,
                              "target_b": [1.5] * 3,
                              "target_omega_hz": [1.0] * 3}),
         "exactly one of"),
        (_tiny_config(drive="magic"), "unknown drive kind"),
        (_tiny_config(drive={"kind": "table"}), "needs a 'path'"),
        (_tiny_config(post={"action": "warp"}), "unknown post action"),
        (_tiny_config(post={"action": "tof"}), "positive duration_s"),
        (_tiny_config(sweep={}), "non-empty mapping"),
        (_tiny_config(sweep={"mass_kg": [1.0]}), "unsupported sweep axis"),
        (_tiny_config(sweep={"alpha_s": []}), "must be non-empty"),
    ]
    for cfg, fragment in bad:
        with pytest.raises((ValueError, KeyError), match=fragment):
            parse_scenario(cfg)


def test_parse_rejects_unphysical_stroke():
    from stafermi import ValidationError
    cfg = _tiny_config()
    cfg["stroke"]["tau_s"] = -1.0
    with pytest.raises(ValidationError):
        parse_scenario(cfg)


def test_resolved_config_reparses_to_itself():
    for name in ("sec3-isotropic", "sec4-isotropic", "sec4-anisotropic",
                 "sec4-tof"):
        s1 = parse_scenario(preset_config(name))
        s2 = parse_scenario(json.loads(json.dumps(s1.config)))
        assert s2.config == s1.config
        assert s2.stroke == s1.stroke
        assert s2.gas == s1.gas


def test_load_scenario_sources(tmp_path):
    via_preset = load_scenario("preset:sec3-isotropic")
    path = tmp_path / "scn.json"
    path.write_text(json.dumps(preset_config("sec3-isotropic")))
    via_file = load_scenario(str(path))
    assert via_file.config == via_preset.config
    with pytest.raises(KeyError):
        load_scenario("preset:nope")
    with pytest.raises(OSError):
        load_scenario(str(tmp_path / "missing.json"))


def test_expand_sweep_cartesian_order():
    scn = parse_scenario(_tiny_config(
        sweep={"alpha_s": [0.0, 1.0], "tau_s": [1e-4, 2e-4]},
        gas={"regime": "viscous-unitary", "energy_ef_units": 0.75}))
    children = expand_sweep(scn)
    assert [c.name for c in children] == [
        "tiny__alpha_s=0__tau_s=0.0001",
        "tiny__alpha_s=0__tau_s=0.0002",
        "tiny__alpha_s=1__tau_s=0.0001",
        "tiny__alpha_s=1__tau_s=0.0002",
    ]
    assert [c.gas.alpha_s for c in children] == [0.0, 0.0, 1.0, 1.0]
    assert [c.stroke.tau for c in children] == [1e-4, 2e-4, 1e-4, 2e-4]
    assert all(c.sweep is None for c in children)


def test_expand_sweep_target_b_overrides_omega_target():
    cfg = {
        "name": "aniso",
        "stroke": {"omega0_hz": [200.0, 200.0, 100.0],
                   "target_omega_hz": [150.0, 150.0, 80.0], "tau_s": 1e-4},
        "gas": {"regime": "unitary", "energy_ef_units": 0.75},
        "sweep": {"target_b": [1.2, 1.4]},
    }
    children = expand_sweep(parse_scenario(cfg))
    assert [c.stroke.target_b.x for c in children] == [1.2, 1.4]
    for c in children:
        assert "target_omega_hz" not in c.config["stroke"]


def test_expand_sweep_without_axes_is_identity():
    scn = parse_scenario(_tiny_config())
    assert expand_sweep(scn) == [scn]


# ---------------------------------------------------------------- running


def test_run_scenario_artifacts(tmp_path):
    scn = load_scenario("preset:sec3-isotropic")
    summary = run_scenario(scn, str(tmp_path))
    csv_path = tmp_path / "sec3-isotropic__trajectory.csv"
    json_path = tmp_path / "sec3-isotropic__summary.json"
    assert csv_path.exists() and json_path.exists()
    assert summary["files"] == [csv_path.name, json_path.name]

    lines = csv_path.read_text().splitlines()
    assert lines[0] == "# stafermi trajectory v1"
    assert lines[1].startswith("# config = ")
    assert json.loads(lines[1][len("# config = "):]) == scn.config
    assert lines[2] == _CSV_COLUMNS
    assert len(lines) == 3 + scn.samples
    # every cell parses back to a float
    cells = [float(v) for v in lines[3].split(",")]
    assert len(cells) == len(_CSV_COLUMNS.split(","))

    on_disk = json.loads(json_path.read_text())
    on_disk.pop("files")
    summary = dict(summary)
    summary.pop("files")
    assert on_disk == summary
    assert summary["feasibility"]["feasible"] is True
    assert summary["kernel_backend"] in ("python", "cython")
    assert np.allclose(summary["b_tau"], 1.5, atol=1e-6)
    assert abs(summary["q_star_tau"] - 1.0) < 1e-6


def test_run_scenario_is_deterministic(tmp_path):
    scn = load_scenario("preset:sec4-anisotropic")
    run_scenario(scn, str(tmp_path / "a"))
    run_scenario(scn, str(tmp_path / "b"))
    for fname in ("sec4-anisotropic__trajectory.csv",
                  "sec4-anisotropic__summary.json"):
        assert ((tmp_path / "a" / fname).read_bytes()
                == (tmp_path / "b" / fname).read_bytes())


def test_run_scenario_with_tof_post(tmp_path):
    scn = load_scenario("preset:sec4-tof")
    summary = run_scenario(scn, str(tmp_path))
    # stroke grid and post grid share the boundary sample
    n_rows = scn.samples + scn.post_samples - 1
    lines = (tmp_path / "sec4-tof__trajectory.csv").read_text().splitlines()
    assert len(lines) == 3 + n_rows
    assert summary["final_t_s"] == pytest.approx(scn.stroke.tau + 5e-4)
    # free flight from a cigar trap: radial axes overtake the axial one
    assert summary["final_ratio_r_z"] > 1.0


def test_run_sweep_writes_table(tmp_path):
    cfg = _tiny_config(sweep={"tau_s": [1e-4, 2e-4, 3e-4]})
    summaries = run_sweep(parse_scenario(cfg), str(tmp_path))
    assert len(summaries) == 3
    table = (tmp_path / "tiny__sweep.csv").read_text().splitlines()
    assert table[0] == "# stafermi sweep v1"
    assert table[2].startswith("tau_s,q_star_tau,")
    assert len(table) == 3 + 3
    assert [float(r.split(",")[0]) for r in table[3:]] == [1e-4, 2e-4, 3e-4]
    for name in ("tiny__tau_s=0.0001", "tiny__tau_s=0.0002",
                 "tiny__tau_s=0.0003"):
        assert (tmp_path / f"{name}__trajectory.csv").exists()


def test_run_sweep_requires_axes(tmp_path):
    with pytest.raises(ValueError, match="no sweep axes"):
        run_sweep(parse_scenario(_tiny_config()), str(tmp_path))


def test_run_sweep_raises_on_failure(tmp_path):
    cfg = _collapse_config(tmp_path)
    cfg["sweep"] = {"tau_s": [1e-7]}
    with pytest.raises(RuntimeError, match="ScaleFactorCollapse"):
        run_sweep(parse_scenario(cfg), str(tmp_path / "out"))


def test_run_batch_continues_past_failures(tmp_path):
    good = parse_scenario(_tiny_config("good"))
    bad = parse_scenario(_collapse_config(tmp_path, name="bad"))
    index = run_batch([good, bad], parallelism=2, out_dir=str(tmp_path / "o"))
    assert [e["name"] for e in index["scenarios"]] == ["good", "bad"]
    assert [e["status"] for e in index["scenarios"]] == ["ok", "error"]
    assert "ScaleFactorCollapse" in index["scenarios"][1]["runs"][0]["error"]
    assert (tmp_path / "o" / "good__trajectory.csv").exists()
    assert (tmp_path / "o" / "batch_index.json").exists()
    on_disk = json.loads((tmp_path / "o" / "batch_index.json").read_text())
    assert on_disk == index


def test_run_batch_empty(tmp_path):
    index = run_batch([], out_dir=str(tmp_path))
    assert index == {"version": 1, "scenarios": []}


def test_run_batch_rejects_duplicate_names(tmp_path):
    scn = parse_scenario(_tiny_config())
    with pytest.raises(ValueError, match="duplicate"):
        run_batch([scn, scn], out_dir=str(tmp_path))


def test_run_batch_expands_sweeps(tmp_path):
    cfg = _tiny_config(sweep={"tau_s": [1e-4, 2e-4]})
    index = run_batch([parse_scenario(cfg)], out_dir=str(tmp_path))
    entry = index["scenarios"][0]
    assert [r["name"] for r in entry["runs"]] == [
        "tiny__tau_s=0.0001", "tiny__tau_s=0.0002"]
    assert entry["files"] == ["tiny__sweep.csv"]
    assert (tmp_path / "tiny__sweep.csv").exists()


# -------------------------------------------------------------------- CLI


def test_cli_run_preset(tmp_path, capsys):
    rc = main(["run", "preset:sec3-isotropic", "-o", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out.strip()
    assert out == str(tmp_path / "sec3-isotropic__summary.json")
    assert (tmp_path / "sec3-isotropic__trajectory.csv").exists()


def test_cli_design(tmp_path, capsys):
    rc = main(["design", "preset:sec4-anisotropic", "-o", str(tmp_path)])
    assert rc == 0
    lines = ((tmp_path / "sec4-anisotropic__design.csv")
             .read_text().splitlines())
    assert lines[0] == "# stafermi design v1"
    assert lines[1].startswith("# config = ")
    assert lines[2].split(",")[0] == "t"
    report = json.loads((tmp_path / "sec4-anisotropic__design.json")
                        .read_text())
    assert report["feasibility"]["feasible"] is True
    assert capsys.readouterr().out.strip().endswith("__design.json")


def test_cli_sweep(tmp_path, capsys):
    cfg = _tiny_config(sweep={"tau_s": [1e-4, 2e-4]})
    path = tmp_path / "scn.json"
    path.write_text(json.dumps(cfg))
    rc = main(["sweep", str(path), "-o", str(tmp_path / "out"),
               "--parallelism", "2"])
    assert rc == 0
    assert (tmp_path / "out" / "tiny__sweep.csv").exists()
    capsys.readouterr()


def test_cli_fit(tmp_path, capsys):
    from stafermi import synthesize_profile, write_profile_csv
    prof = synthesize_profile(10e-6, a0=0.1, a1=1.0, n=801, snr=50.0, seed=1)
    path = tmp_path / "prof.csv"
    write_profile_csv(prof, path)

    rc = main(["fit", str(path)])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert abs(payload["sigma"] - 10e-6) / 10e-6 < 0.01
    assert payload["converged"] is True
    assert not (tmp_path / "prof__fit.json").exists()

    rc = main(["fit", str(path), "-o", str(tmp_path)])
    assert rc == 0
    capsys.readouterr()
    saved = json.loads((tmp_path / "prof__fit.json").read_text())
    assert saved == payload


def test_cli_exit_1_on_invalid_input(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.json")]) == 1
    assert main(["run", "preset:nope"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == 1
    incomplete = tmp_path / "incomplete.json"
    incomplete.write_text(json.dumps({"name": "x"}))
    assert main(["run", str(incomplete)]) == 1
    err = capsys.readouterr().err
    assert "invalid input" in err


def test_cli_exit_2_on_numerical_failure(tmp_path, capsys):
    cfg = _collapse_config(tmp_path)
    path = tmp_path / "crush.json"
    path.write_text(json.dumps(cfg))
    assert main(["run", str(path), "-o", str(tmp_path / "out")]) == 2
    assert "numerical failure" in capsys.readouterr().err


def test_cli_out_dir_precedence(tmp_path, monkeypatch, capsys):
    cfg = _tiny_config(output={"samples": 11, "dir": str(tmp_path / "cfgdir")})
    path = tmp_path / "scn.json"
    path.write_text(json.dumps(cfg))

    # scenario's own output.dir is the fallback
    monkeypatch.delenv("STA_OUT_DIR", raising=False)
    assert main(["run", str(path)]) == 0
    assert (tmp_path / "cfgdir" / "tiny__trajectory.csv").exists()

    # the environment variable overrides it
    monkeypatch.setenv("STA_OUT_DIR", str(tmp_path / "envdir"))
    assert main(["run", str(path)]) == 0
    assert (tmp_path / "envdir" / "tiny__trajectory.csv").exists()

    # the flag beats both
    assert main(["run", str(path), "-o", str(tmp_path / "flagdir")]) == 0
    assert (tmp_path / "flagdir" / "tiny__trajectory.csv").exists()
    capsys.readouterr()


def test_cli_default_out_dir(tmp_path, monkeypatch, capsys):
    path = tmp_path / "scn.json"
    path.write_text(json.dumps(_tiny_config()))
    monkeypatch.delenv("STA_OUT_DIR", raising=False)
    monkeypatch.chdir(tmp_path)
    assert main(["run", str(path)]) == 0
    assert (tmp_path / "sta-out" / "tiny__trajectory.csv").exists()
    capsys.readouterr()


def test_cli_tolerance_override_lands_in_header(tmp_path, capsys):
    rc = main(["run", "preset:sec3-isotropic", "-o", str(tmp_path),
               "--rel-tol", "1e-8", "--abs-tol", "1e-11"])
    assert rc == 0
    lines = ((tmp_path / "sec3-isotropic__trajectory.csv")
             .read_text().splitlines())
    header_cfg = json.loads(lines[1][len("# config = "):])
    assert header_cfg["integrator"] == {"rel_tol": 1e-8, "abs_tol": 1e-11}
    capsys.readouterr()


def test_cli_run_ignores_sweep_axes(tmp_path, capsys):
    rc = main(["run", "preset:sec4-tof", "-o", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "sec4-tof__trajectory.csv").exists()
    assert not (tmp_path / "sec4-tof__sweep.csv").exists()
    capsys.readouterr()
