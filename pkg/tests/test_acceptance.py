"""Acceptance gate: the nine headline claims, one test per criterion.

Run with `pytest tests/test_acceptance.py -v` to get one pass/fail line
per criterion.  Tolerances are pinned here and must not be loosened.
"""

import filecmp
import math
import os
import time

import numpy as np
import pytest

from stafermi import (AxisTriple, GasSpec, IntegratorConfig, PRESET_NAMES,
                      Regime, ScalingState, StrokeSpec, constant_drive,
                      gaussian_fit, infer_in_trap_size,
                      integrate_noninteracting, integrate_unitary,
                      lcd_anisotropic_unitary, lcd_isotropic_unitary,
                      load_scenario, parse_scenario, preset_config,
                      run_batch, run_scenario, run_sweep,
                      smoothstep_frequency, synthesize_profile,
                      tof_continuation, zero_drive)
from stafermi.scenario import _integrate, build_drive

COL = {name: i for i, name in enumerate(
    ("t,b_x,b_y,b_z,bdot_x,bdot_y,bdot_z,omega2_x,omega2_y,omega2_z,"
     "q_star,mean_energy,mean_work,sigma_x_m,sigma_y_m,sigma_z_m,"
     "ratio_z_x,ratio_r_z,cq,stress_xx,stress_yy,stress_zz").split(","))}


@pytest.fixture(scope="module")
def outroot(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def _table(path):
    return np.loadtxt(path, delimiter=",", skiprows=3)


def test_criterion_1_friction_free_isotropic_sta(outroot):
    """sec3-isotropic under LCD: b_j(tau)=1.500+-1e-3 on all axes,
    bdot_j(tau)/omega_j0 = 0+-1e-3, Q*(tau) = 1+-1e-3, size ratio
    z/x = 1+-1e-3 at every output time, in under a second."""
    scn = load_scenario("preset:sec3-isotropic")
    t_start = time.perf_counter()
    summary = run_scenario(scn, str(outroot / "c1"))
    runtime = time.perf_counter() - t_start

    b_tau = np.asarray(summary["b_tau"])
    assert np.max(np.abs(b_tau - 1.5)) <= 1e-3
    assert np.max(np.abs(summary["bdot_tau_over_omega0"])) <= 1e-3
    assert abs(summary["q_star_tau"] - 1.0) <= 1e-3

    rows = _table(outroot / "c1" / "sec3-isotropic__trajectory.csv")
    ratio_z_x = rows[:, COL["ratio_z_x"]]
    assert np.max(np.abs(ratio_z_x - 1.0)) <= 1e-3

    assert runtime < 1.0


def test_criterion_2_reference_drive_friction(outroot):
    """The same stroke without the LCD correction pays for it:
    Q*(tau) > 1 + 1e-2 and less work is extracted than the LCD value."""
    cfg = preset_config("sec3-isotropic")
    cfg["name"] = "sec3-isotropic-reference"
    cfg["drive"] = "reference"
    ref = run_scenario(parse_scenario(cfg), str(outroot / "c2"))
    lcd = run_scenario(load_scenario("preset:sec3-isotropic"),
                       str(outroot / "c2"))
    assert ref["q_star_tau"] > 1.0 + 1e-2
    assert ref["mean_work_tau"] > -0.5556
    assert ref["mean_work_tau"] > lcd["mean_work_tau"]
    # the LCD endpoint itself sits at the adiabatic value 1/1.5^2 - 1
    assert lcd["mean_work_tau"] == pytest.approx(-5.0 / 9.0, abs=1e-6)


def test_criterion_3_anisotropic_aspect_ratio(outroot):
    """sec4-anisotropic at alpha_S = 0: realized b_x/b_z at tau equals
    1.86 +- 0.01 and matches the closed-form frequency-ratio value to
    1e-6 relative."""
    summary = run_scenario(load_scenario("preset:sec4-anisotropic"),
                           str(outroot / "c3"))
    aspect = summary["b_tau"][0] / summary["b_tau"][2]
    assert abs(aspect - 1.86) <= 0.01
    # on the adiabat b_j = (w_j0/w_j) sqrt(nu/nu0); the volume factors
    # cancel in the ratio, leaving pure frequency ratios
    closed_form = (5581.5 / 2480.7) / (252.7 / 208.8)
    assert closed_form == pytest.approx(1.8590965067894385, rel=1e-15)
    assert abs(aspect / closed_form - 1.0) <= 1e-6


def test_criterion_4_isotropic_viscous_equivalence(outroot):
    """sec4-isotropic at alpha_S = 0 and 5: identical trajectories to
    1e-8, with sigma_jj = 0 (relative to the mean trap frequency) and
    C_Q = 0 to 1e-12; viscosity cannot couple to an isotropic flow."""
    trajs = []
    for alpha in (0.0, 5.0):
        cfg = preset_config("sec4-isotropic")
        cfg["name"] = f"sec4-isotropic-a{alpha:g}"
        cfg["gas"]["alpha_s"] = alpha
        scn = parse_scenario(cfg)
        _, drive = build_drive(scn)
        trajs.append(_integrate(scn, drive))
    a, b = trajs
    assert np.max(np.abs(a.b - b.b)) < 1e-8
    nu0 = float(np.prod(a.spec.omega0.as_array())) ** (1.0 / 3.0)
    for traj in trajs:
        assert np.max(np.abs(traj.sigma_stress())) / nu0 < 1e-12
        assert np.max(np.abs(traj.cq)) < 1e-12


def test_criterion_5_viscous_tof_monotonicity(outroot):
    """Anisotropic TOF from the cigar trap: the aspect ratio after 500 us
    decreases strictly with alpha_S in {0, 1, 2, 5}, and the radial cloud
    grows 15-25x at alpha_S = 0."""
    scn = load_scenario("preset:sec4-tof")
    summaries = run_sweep(scn, str(outroot / "c5"))
    alphas = [0.0, 1.0, 2.0, 5.0]
    assert [s["config"]["gas"]["alpha_s"] for s in summaries] == alphas
    aspect = [s["final_b"][0] / s["final_b"][2] for s in summaries]
    assert all(x > y for x, y in zip(aspect, aspect[1:]))
    radial_growth = summaries[0]["final_b"][0]
    assert 15.0 < radial_growth < 25.0


def test_criterion_6_free_expansion_oracle():
    """Noninteracting free expansion follows sqrt(1 + w0^2 t^2) to 1e-8
    relative over 5 ms at w0 = 2 pi 230 Hz."""
    w0 = 2.0 * math.pi * 230.0
    spec = StrokeSpec.from_hz([230.0, 230.0, 230.0], 5e-3, target_b=1.0)
    traj = integrate_noninteracting(zero_drive(5e-3), spec,
                                    IntegratorConfig(output_grid=501))
    expected = np.sqrt(1.0 + (w0 * traj.t) ** 2)
    assert np.max(np.abs(traj.b - expected[:, None]) / expected[:, None]) \
        < 1e-8


def test_criterion_7_property_suites():
    """Schedule boundaries (six conditions per axis, 1e-10), traceless
    stress (1e-12), LCD endpoint identity, isotropic-vs-anisotropic LCD
    agreement (1e-10 over 1000 samples), constant-drive energy
    conservation (1e-8 over 10 periods), and time reversal (1e-6)."""
    sec3 = StrokeSpec.from_hz([825.0, 230.0, 230.0], 1.25e-3, target_b=1.5)
    sec4 = StrokeSpec.from_hz([5581.5, 5581.5, 252.7], 1.5e-3,
                              target_omega_hz=[2480.7, 2480.7, 208.8])

    # boundary conditions: values hit the endpoints, rates and curvatures
    # vanish, on both ends of every axis
    for spec in (sec3, sec4):
        sched = smoothstep_frequency(spec)
        w0 = spec.omega0.as_array()
        wt = spec.omega_tau.as_array()
        tau = spec.tau
        assert np.max(np.abs(sched.omega(0.0) - w0) / w0) < 1e-10
        assert np.max(np.abs(sched.omega(tau) - wt) / w0) < 1e-10
        assert np.max(np.abs(sched.domega(0.0)) / (w0 / tau)) < 1e-10
        assert np.max(np.abs(sched.domega(tau)) / (w0 / tau)) < 1e-10
        assert np.max(np.abs(sched.ddomega(0.0)) / (w0 / tau ** 2)) < 1e-10
        assert np.max(np.abs(sched.ddomega(tau)) / (w0 / tau ** 2)) < 1e-10

    # traceless stress along a strongly anisotropic trajectory
    sched4 = smoothstep_frequency(sec4)
    traj = integrate_unitary(lcd_anisotropic_unitary(sched4), sec4)
    sigma = traj.sigma_stress()
    assert np.max(np.abs(sigma.sum(axis=1))) / max(np.max(np.abs(sigma)),
                                                   1.0) < 1e-12

    # LCD endpoint identity Omega_j^2(tau) = omega_j^2(tau)
    drive4 = lcd_anisotropic_unitary(sched4)
    wt_sq = sched4.omega(sec4.tau) ** 2
    assert np.max(np.abs(drive4.omega2(sec4.tau) - wt_sq) / wt_sq) < 1e-10

    # isotropic and anisotropic LCD formulas agree on an isotropic stroke
    sched3 = smoothstep_frequency(sec3)
    t = np.linspace(0.0, sec3.tau, 1000)
    iso = lcd_isotropic_unitary(sched3).omega2(t)
    aniso = lcd_anisotropic_unitary(sched3).omega2(t)
    assert np.max(np.abs(iso - aniso) / np.max(np.abs(aniso), axis=0)) \
        < 1e-10

    # energy conservation over ten slow-axis periods of constant drive
    periods = 10.0 / 252.7
    hold_spec = StrokeSpec(omega0=sec4.omega0, target_b=AxisTriple.of(1.0),
                           tau=periods)
    start = ScalingState(b=AxisTriple(1.05, 0.97, 1.02),
                         bdot=AxisTriple.of(0.0), cq=0.0, t=0.0)
    htraj = integrate_unitary(constant_drive(hold_spec.omega0, periods),
                              hold_spec, initial_state=start)
    w0sq = hold_spec.omega0.as_array() ** 2
    energy = (0.5 / htraj.gamma ** (2.0 / 3.0)
              + np.sum((htraj.bdot ** 2 + w0sq * htraj.b ** 2) / w0sq,
                       axis=1) / 6.0)
    assert np.max(np.abs(energy - energy[0])) / energy[0] < 1e-8

    # time reversal: mirrored drive, reversed rates, back to rest at b = 1
    fwd = integrate_unitary(drive4, sec4)
    end = fwd.final_state()
    flipped = ScalingState(b=end.b, bdot=end.bdot.map(lambda v: -v),
                           cq=0.0, t=0.0)
    back = integrate_unitary(drive4.mirrored(), sec4, initial_state=flipped)
    assert np.max(np.abs(back.b[-1] - 1.0)) < 1e-6
    assert np.max(np.abs(back.bdot[-1])) / np.max(sec4.omega0.as_array()) \
        < 1e-6


def test_criterion_8_fit_pipeline():
    """Gaussian fit: exact (1e-8) on noiseless data; within 1% of the true
    sigma in at least 95 of 100 seeded snr = 20 profiles; in-trap size
    round-trips through a TOF within 1%."""
    sigma_true = 12e-6
    clean = gaussian_fit(synthesize_profile(sigma_true, a0=0.1, a1=2.0,
                                            n=4001))
    assert abs(clean.sigma - sigma_true) / sigma_true < 1e-8

    hits = 0
    for seed in range(100):
        prof = synthesize_profile(sigma_true, a0=0.1, a1=2.0, n=4001,
                                  snr=20.0, seed=seed)
        fit = gaussian_fit(prof)
        if fit.converged and abs(fit.sigma - sigma_true) / sigma_true < 0.01:
            hits += 1
    assert hits >= 95

    spec = StrokeSpec.from_hz([825.0, 230.0, 230.0], 1e-4, target_b=1.0)
    gas = GasSpec(regime=Regime.NONINTERACTING, initial_energy=1e-28)
    base = integrate_noninteracting(constant_drive(spec.omega0, spec.tau),
                                    spec, gas=gas.resolve(spec))
    full = tof_continuation(base, gas, 1.5e-3)
    sigma0 = gas.resolve(spec).sigma0().x
    prof = synthesize_profile(sigma0 * full.b[-1, 0], a0=0.05, a1=1.0,
                              n=2001, snr=100.0, seed=3)
    recovered = infer_in_trap_size(gaussian_fit(prof), full, axis="x")
    assert abs(recovered - sigma0) / sigma0 < 0.01


def test_criterion_9_batch_determinism(outroot):
    """The full preset batch writes byte-identical CSVs at parallelism 1
    and parallelism 8."""
    def batch(par, where):
        scns = [load_scenario(f"preset:{name}") for name in PRESET_NAMES]
        return run_batch(scns, parallelism=par, out_dir=str(where))

    dir1 = outroot / "batch-par1"
    dir8 = outroot / "batch-par8"
    index1 = batch(1, dir1)
    index8 = batch(8, dir8)
    assert index1 == index8

    names1 = sorted(os.listdir(dir1))
    assert names1 == sorted(os.listdir(dir8))
    csvs = [n for n in names1 if n.endswith(".csv")]
    assert len(csvs) >= 8  # 7 trajectories + the sweep table
    for name in names1:
        assert filecmp.cmp(dir1 / name, dir8 / name, shallow=False), name
