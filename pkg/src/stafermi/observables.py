"""Thermodynamic and geometric diagnostics of scaling trajectories.

The central quantity is the nonadiabatic factor Q*: the ratio of the
actual mean energy to the mean energy of the instantaneous adiabat.
Q* = 1 signals friction-free evolution.  Energies and work are reported
in units of the initial mean energy <H(0)>; absolute Joules follow by
multiplying with GasSpec.initial_energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FrequencyCrossesZero, NotIsotropic
from .model import AxisTriple, GasSpec, ScalingState, StrokeSpec, Trajectory
from .schedules import AdiabaticPath, FrequencySchedule, adiabatic_reference


@dataclass(frozen=True)
class ObservableRecord:
    """Derived quantities at one sample time."""

    t: float
    q_star: float
    mean_energy: float        # units of <H(0)>
    mean_work: float          # units of <H(0)>
    sizes: AxisTriple         # m
    dimensionless_sizes: AxisTriple  # sigma_j(t)/sigma_j(0) = b_j(t)
    ratio_z_x: float          # dimensionless-size ratio z over x
    ratio_r_z: float          # radial (geometric mean of x, y) over z


def q_star_noninteracting(state: ScalingState, omega: float,
                          spec: StrokeSpec, gas: GasSpec | None = None) -> float:
    """Isotropic noninteracting Q* against the adiabat b_ad = sqrt(w0/w).

    Q* = b_ad^2 [ 1/(2 b^2) + w^2 b^2/(2 w0^2) + bdot^2/(2 w0^2) ].
    """
    if not spec.omega0.is_isotropic(1e-12):
        raise NotIsotropic("trap frequencies are anisotropic; "
                           "use q_star_noninteracting_axes")
    vdiff = max(abs(state.bdot.x - state.bdot.y),
                abs(state.bdot.x - state.bdot.z),
                abs(state.bdot.y - state.bdot.z))
    vscale = max(1.0, abs(state.bdot.x), abs(state.bdot.y), abs(state.bdot.z))
    if state.b.max_relative_spread() > 1e-9 or vdiff > 1e-9 * vscale:
        raise NotIsotropic("state is anisotropic; use q_star_noninteracting_axes")
    if omega <= 0.0:
        raise FrequencyCrossesZero(f"omega = {omega!r} must be > 0")
    w0 = spec.omega0.x
    b = state.b.x
    v = state.bdot.x
    bad_sq = w0 / omega
    w0sq = w0 * w0
    return bad_sq * (1.0 / (2.0 * b * b)
                     + (omega * omega) * b * b / (2.0 * w0sq)
                     + v * v / (2.0 * w0sq))


def q_star_noninteracting_axes(state: ScalingState, omega: AxisTriple,
                               spec: StrokeSpec) -> AxisTriple:
    """Per-axis Q*_j for the decoupled gas (axes evolve independently)."""
    out = []
    for j in range(3):
        w = omega[j]
        if w <= 0.0:
            raise FrequencyCrossesZero(f"omega_{'xyz'[j]} = {w!r} must be > 0")
        w0 = spec.omega0[j]
        b = state.b[j]
        v = state.bdot[j]
        bad_sq = w0 / w
        w0sq = w0 * w0
        out.append(bad_sq * (1.0 / (2.0 * b * b)
                             + w * w * b * b / (2.0 * w0sq)
                             + v * v / (2.0 * w0sq)))
    return AxisTriple(*out)


def q_star_unitary(state: ScalingState, omega2: AxisTriple,
                   spec: StrokeSpec, gamma_ad: float) -> float:
    """Unitary Q* from the state and the applied squared frequencies.

    Q* = Gamma_ad^{2/3} [ 1/(2 Gamma^{2/3})
         + (1/6) sum_j (bdot_j^2 + Omega_j^2 b_j^2) / omega_{j,0}^2 ].
    ``omega2`` is the drive actually applied at this instant (it may be
    an LCD value and may be negative mid-stroke); ``gamma_ad`` comes from
    the adiabatic reference of the underlying frequency schedule.
    """
    if gamma_ad <= 0.0:
        raise FrequencyCrossesZero(
            f"gamma_ad = {gamma_ad!r} must be > 0 (reference frequencies "
            "must stay positive)")
    g = state.gamma
    g23 = g ** (2.0 / 3.0)
    acc = 0.0
    for j in range(3):
        w0sq = spec.omega0[j] * spec.omega0[j]
        v = state.bdot[j]
        b = state.b[j]
        acc += (v * v + omega2[j] * b * b) / w0sq
    return gamma_ad ** (2.0 / 3.0) * (1.0 / (2.0 * g23) + acc / 6.0)


def isotropic_q_star_drive_form(schedule: FrequencySchedule, t) -> np.ndarray:
    """Closed-form Q* along the isotropic LCD path, no integration:

    Q*(t) = 1 + (1/12) sum_j ( omegaddot_j/omega_j^3 - omegadot_j^2/omega_j^4 ).
    """
    w = schedule.omega(t)
    wd = schedule.domega(t)
    wdd = schedule.ddomega(t)
    w2 = w * w
    term = wdd / (w2 * w) - (wd * wd) / (w2 * w2)
    return 1.0 + np.sum(term, axis=-1) / 12.0


def mean_energy_and_work(q_star, adiabatic_factor):
    """(<H(t)>, <W(t)>) in units of <H(0)>.

    ``adiabatic_factor`` is the adiabatic energy-reduction denominator:
    b_ad^2 for the isotropic noninteracting gas, Gamma_ad^{2/3} at
    unitarity.  <H> = Q*/factor, <W> = <H> - 1.
    """
    h = np.asarray(q_star, dtype=float) / np.asarray(adiabatic_factor,
                                                     dtype=float)
    return h, h - 1.0


def cloud_sizes(traj: Trajectory, gas: GasSpec | None = None) -> dict:
    """Per-time rms sizes sigma_j(t) = b_j(t) sigma_j(0) and aspect ratios.

    Dimensionless sizes equal the scale factors identically, by the very
    definition b_j = sqrt(<R_j^2(t)>/<R_j^2(0)>).
    """
    gas = gas or traj.gas
    s0 = gas.sigma0().as_array()
    return {
        "sizes": traj.b * s0,
        "dimensionless_sizes": traj.b,
        "ratio_z_x": traj.b[:, 2] / traj.b[:, 0],
        "ratio_r_z": np.sqrt(traj.b[:, 0] * traj.b[:, 1]) / traj.b[:, 2],
    }


def _gamma_ad_series(schedule: FrequencySchedule, t: np.ndarray) -> np.ndarray:
    # A Hold view of the schedule freezes the adiabat past tau, which is
    # exactly the reference state during a hold or a time of flight.
    from .schedules import PostStrokeMode
    if schedule.mode is not PostStrokeMode.HOLD:
        schedule = FrequencySchedule(omega0=schedule.omega0,
                                     ratio=schedule.ratio, tau=schedule.tau,
                                     mode=PostStrokeMode.HOLD,
                                     kind=schedule.kind)
    return adiabatic_reference(schedule).gamma(np.minimum(t, schedule.tau))


def trajectory_observables(traj: Trajectory,
                           schedule: FrequencySchedule) -> dict:
    """Vectorized observable columns for a whole trajectory.

    Works for the coupled regimes (unitary, viscous-unitary) and for the
    noninteracting gas; the regime decides which Q* definition applies.
    For the decoupled gas the axis energies are summed with the
    equipartition weights E_j(0) = <H(0)>/3.
    """
    from .model import Regime

    t = traj.t
    b = traj.b
    v = traj.bdot
    om2 = traj.drive_omega2
    w0sq = traj.spec.omega0.as_array() ** 2

    if traj.gas.regime is Regime.NONINTERACTING:
        w_ref = schedule.omega(np.minimum(t, schedule.tau))
        bad_sq = traj.spec.omega0.as_array() / w_ref
        q_axis = bad_sq * (1.0 / (2.0 * b * b)
                           + om2 * b * b / (2.0 * w0sq)
                           + v * v / (2.0 * w0sq))
        energy_axis = q_axis / bad_sq
        mean_energy = np.mean(energy_axis, axis=-1)
        energy_ad = np.mean(1.0 / bad_sq, axis=-1)
        q_star = mean_energy / energy_ad
    else:
        gamma_ad = _gamma_ad_series(schedule, t)
        g23 = np.power(traj.gamma, 2.0 / 3.0)
        acc = np.sum((v * v + om2 * b * b) / w0sq, axis=-1)
        q_star = np.power(gamma_ad, 2.0 / 3.0) * (1.0 / (2.0 * g23)
                                                  + acc / 6.0)
        mean_energy = q_star / np.power(gamma_ad, 2.0 / 3.0)

    sizes = cloud_sizes(traj)
    return {
        "t": t,
        "q_star": q_star,
        "mean_energy": mean_energy,
        "mean_work": mean_energy - 1.0,
        "sizes": sizes["sizes"],
        "dimensionless_sizes": sizes["dimensionless_sizes"],
        "ratio_z_x": sizes["ratio_z_x"],
        "ratio_r_z": sizes["ratio_r_z"],
        "cq": traj.cq,
        "stress": traj.sigma_stress(),
    }


def observable_records(traj: Trajectory,
                       schedule: FrequencySchedule) -> list[ObservableRecord]:
    cols = trajectory_observables(traj, schedule)
    out = []
    for i in range(len(traj)):
        out.append(ObservableRecord(
            t=float(cols["t"][i]),
            q_star=float(cols["q_star"][i]),
            mean_energy=float(cols["mean_energy"][i]),
            mean_work=float(cols["mean_work"][i]),
            sizes=AxisTriple(*cols["sizes"][i]),
            dimensionless_sizes=AxisTriple(*cols["dimensionless_sizes"][i]),
            ratio_z_x=float(cols["ratio_z_x"][i]),
            ratio_r_z=float(cols["ratio_r_z"][i]),
        ))
    return out
