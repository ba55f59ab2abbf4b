"""Driving-frequency construction: reference drives, counterdiabatic
corrections for every regime, and feasibility reporting.

A drive is the squared trap frequency Omega_j^2(t) actually applied to the
gas.  Squared values may legitimately go negative (an expulsive potential);
realizability in an optical trap is a separate question answered by
:func:`feasibility_check`, never enforced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constants import HBAR
from .errors import NotIsotropicShape, ScaleFactorNonPositive
from .model import AXES, AxisTriple, GasSpec, StrokeSpec, Trajectory
from .numerics import (cumulative_simpson_uniform, fd_derivative_uniform,
                       hermite_eval)
from .schedules import (AdiabaticPath, FrequencySchedule, ScalePath,
                        adiabatic_reference)
from ._kernel.program import (DEFAULT_TABLE_NODES, DriveProgram,
                              constant_program, table_program)

_FEAS_SCAN = 2049


def schedule_to_stroke(schedule: FrequencySchedule) -> StrokeSpec:
    """Recover the nominal stroke a schedule was built from."""
    target_b = AxisTriple(*(1.0 / np.sqrt(r) for r in schedule.ratio))
    return StrokeSpec(omega0=schedule.omega0, target_b=target_b,
                      tau=schedule.tau)


@dataclass(frozen=True, eq=False)
class DriveSchedule:
    """Per-axis squared driving frequency on [0, tau].

    ``constant`` short-circuits evaluation (and the kernels) for drives
    that are exactly time-independent.  ``table`` carries precomputed node
    data when the drive was *born* tabular, so compiling it for the kernel
    is a pass-through instead of a resampling.
    """

    kind: str
    tau: float
    _fn: Callable = field(repr=False)
    constant: tuple[float, float, float] | None = None
    table: tuple[float, float, np.ndarray, np.ndarray] | None = field(
        default=None, repr=False)
    feasible: bool = field(init=False, default=True)

    def __post_init__(self):
        t = np.linspace(0.0, self.tau, _FEAS_SCAN)
        object.__setattr__(self, "feasible",
                           bool(np.min(self.omega2(t)) > 0.0))

    def omega2(self, t) -> np.ndarray:
        """Omega_j^2(t) in rad^2/s^2, shape (..., 3)."""
        if self.constant is not None:
            t = np.asarray(t, dtype=float)
            return np.broadcast_to(np.array(self.constant),
                                   t.shape + (3,)).copy()
        return self._fn(np.asarray(t, dtype=float))

    def mirrored(self) -> "DriveSchedule":
        """The time-reversed drive t -> Omega^2(tau - t)."""
        if self.constant is not None:
            return DriveSchedule(kind=self.kind + "-mirrored", tau=self.tau,
                                 _fn=self._fn, constant=self.constant)
        tau = self.tau
        fn = self._fn
        table = None
        if self.table is not None:
            t0, t1, vals, ders = self.table
            table = (tau - t1, tau - t0, vals[:, ::-1].copy(),
                     -ders[:, ::-1].copy())
        return DriveSchedule(kind=self.kind + "-mirrored", tau=tau,
                             _fn=lambda t: fn(tau - np.asarray(t, dtype=float)),
                             table=table)

    def to_program(self, n: int = DEFAULT_TABLE_NODES) -> DriveProgram:
        """Compile for the integration kernels."""
        if self.constant is not None:
            return constant_program(self.constant, 0.0, self.tau)
        if self.table is not None:
            t0, t1, vals, ders = self.table
            return table_program(t0, t1, vals, ders)
        t = np.linspace(0.0, self.tau, n)
        vals = np.ascontiguousarray(self.omega2(t).T)
        ders = np.ascontiguousarray(
            fd_derivative_uniform(vals.T, t[1] - t[0]).T)
        return table_program(0.0, self.tau, vals, ders)


def _identity_constant(schedule: FrequencySchedule):
    """Detect an identity stroke so the drive stays exactly constant."""
    if schedule.ratio.as_tuple() == (1.0, 1.0, 1.0):
        w0 = schedule.omega0
        return (w0.x * w0.x, w0.y * w0.y, w0.z * w0.z)
    return None


def constant_drive(omega: AxisTriple, tau: float) -> DriveSchedule:
    """Hold the trap at fixed frequencies (given in rad/s, not squared)."""
    c = (omega.x * omega.x, omega.y * omega.y, omega.z * omega.z)
    return DriveSchedule(kind="constant", tau=float(tau),
                         _fn=lambda t: None, constant=c)


def zero_drive(duration: float) -> DriveSchedule:
    """Trap off: Omega_j^2 = 0, the time-of-flight drive."""
    return DriveSchedule(kind="tof", tau=float(duration),
                         _fn=lambda t: None, constant=(0.0, 0.0, 0.0))


def reference_drive(schedule: FrequencySchedule) -> DriveSchedule:
    """The uncorrected drive Omega_j^2(t) = omega_j^2(t)."""
    def fn(t):
        w = schedule.omega(t)
        return w * w
    return DriveSchedule(kind="reference", tau=schedule.tau, _fn=fn,
                         constant=_identity_constant(schedule))


def lcd_anisotropic_unitary(schedule: FrequencySchedule) -> DriveSchedule:
    """Counterdiabatic drive for the unitary gas, general anisotropic form.

    Omega_j^2 = omega_j^2 - 2 (omegadot_j/omega_j)^2 + omegaddot_j/omega_j
                + (1/4)(nudot/nu)^2 - (1/2) nuddot/nu
                + (omegadot_j/omega_j)(nudot/nu),
    written through the logarithmic rates so the endpoint corrections
    vanish identically.  Equals omega_j^2 - bddot_j/b_j on the adiabat;
    that equivalent route lives in AdiabaticPath and the two are kept as
    independent implementations on purpose.
    """
    adiabatic_reference(schedule)  # positivity check, same error contract

    def fn(t):
        w = schedule.omega(t)
        u = schedule.domega(t) / w
        wddw = schedule.ddomega(t) / w
        udot = wddw - u * u
        p = np.sum(u, axis=-1, keepdims=True) / 3.0
        pdot = np.sum(udot, axis=-1, keepdims=True) / 3.0
        return (w * w - 2.0 * u * u + wddw
                + 0.25 * p * p - 0.5 * (pdot + p * p) + u * p)

    return DriveSchedule(kind="lcd-anisotropic-unitary", tau=schedule.tau,
                         _fn=fn, constant=_identity_constant(schedule))


def lcd_isotropic_unitary(schedule: FrequencySchedule) -> DriveSchedule:
    """Isotropic special case: Omega^2 = omega^2 - (3/4)(omegadot/omega)^2
    + (1/2) omegaddot/omega.  Requires all axes to share one shape."""
    if not schedule.is_isotropic_shape(rel_tol=1e-12):
        raise NotIsotropicShape(
            f"per-axis shapes differ beyond 1e-12: ratios {schedule.ratio}")
    adiabatic_reference(schedule)

    def fn(t):
        w = schedule.omega(t)
        u = schedule.domega(t) / w
        wddw = schedule.ddomega(t) / w
        return w * w - 0.75 * u * u + 0.5 * wddw

    return DriveSchedule(kind="lcd-isotropic-unitary", tau=schedule.tau,
                         _fn=fn, constant=_identity_constant(schedule))


def lcd_noninteracting(schedule: FrequencySchedule,
                       desired_b: ScalePath) -> DriveSchedule:
    """Per-axis exact inversion Omega_j^2 = omega_{j,0}^2/b_j^4 - bddot_j/b_j
    for an uncoupled gas following the given scale-factor path."""
    check_t = np.linspace(0.0, schedule.tau, 1001)
    bmin = float(np.min(desired_b.b(check_t)))
    if bmin <= 0.0:
        raise ScaleFactorNonPositive(
            f"desired path reaches b = {bmin:.3g}; inversion undefined")
    w0sq = schedule.omega0.as_array() ** 2

    def fn(t):
        b = desired_b.b(t)
        b2 = b * b
        return w0sq / (b2 * b2) - desired_b.bddot(t) / b

    constant = None
    if desired_b.target_b.as_tuple() == (1.0, 1.0, 1.0):
        constant = tuple(w0sq)
    return DriveSchedule(kind="lcd-noninteracting", tau=schedule.tau,
                         _fn=fn, constant=constant)


def _resolved(gas: GasSpec, schedule: FrequencySchedule) -> GasSpec:
    if gas.initial_msq_sizes is not None and gas.virial_denominator is not None:
        return gas
    return gas.resolve(schedule_to_stroke(schedule))


def adiabatic_reference_trajectory(schedule: FrequencySchedule, gas: GasSpec,
                                   n: int = DEFAULT_TABLE_NODES) -> Trajectory:
    """The desired viscous-STA path, sampled from closed forms.

    Scale factors, rates, and accelerations come from the analytic adiabat;
    the heating coefficient C_Q integrates
    Cdot_Q = Gamma^{2/3} hbar <alpha_S> sum_j sigma_jj^2 / <r.grad U>_0
    along it by cumulative Simpson.  ``aux`` carries bddot and sigma so the
    viscous counterdiabatic construction needs no numerical
    differentiation of the path itself.
    """
    gas = _resolved(gas, schedule)
    path = adiabatic_reference(schedule)
    t = np.linspace(0.0, schedule.tau, n)
    b = path.b(t)
    bdot = path.bdot(t)
    bddot = path.bddot(t)
    rates = bdot / b
    sigma = 2.0 * rates - (2.0 / 3.0) * np.sum(rates, axis=-1, keepdims=True)
    gamma = np.prod(b, axis=-1)
    g23 = np.power(gamma, 2.0 / 3.0)
    crate = HBAR * gas.alpha_s / gas.virial_denominator
    cq = cumulative_simpson_uniform(
        crate * g23 * np.sum(sigma * sigma, axis=-1), t[1] - t[0])
    w = schedule.omega(t)
    return Trajectory(spec=schedule_to_stroke(schedule), gas=gas,
                      t=t, b=b, bdot=bdot, cq=cq, drive_omega2=w * w,
                      aux={"bddot": bddot, "sigma": sigma})


def lcd_viscous_unitary(schedule: FrequencySchedule, gas: GasSpec,
                        reference_solution: Trajectory) -> DriveSchedule:
    """Drive making the reference path an exact viscous-ODE solution.

    Omega_j^2 = omega_{j,0}^2 (1 + C_Q) / (Gamma^{2/3} b_j^2)
                - hbar <alpha_S> sigma_jj / (m <x_j^2>_0 b_j^2)
                - bddot_j / b_j,
    evaluated along the supplied path.  With alpha_S = 0 this reduces to
    the inviscid counterdiabatic drive.  Note the stationary-endpoint
    identity Omega_j^2(tau) = omega_j^2(tau) picks up the factor
    (1 + C_Q(tau)) when alpha_S > 0: holding a viscously heated cloud
    stationary takes a stiffer trap.
    """
    gas = _resolved(gas, schedule)
    traj = reference_solution
    t = traj.t
    if len(t) < 5:
        raise ValueError("reference path needs at least 5 samples")
    h = t[1] - t[0]
    if not np.allclose(np.diff(t), h, rtol=1e-9, atol=0.0):
        raise ValueError("reference path must be sampled on a uniform grid")
    b = traj.b
    if np.min(b) <= 0.0:
        raise ScaleFactorNonPositive(
            f"reference path reaches b = {np.min(b):.3g}")
    bddot = traj.aux.get("bddot")
    if bddot is None:
        bddot = fd_derivative_uniform(traj.bdot, h)
    sigma = traj.aux.get("sigma")
    if sigma is None:
        sigma = traj.sigma_stress()
    g23 = np.power(np.prod(b, axis=-1), 2.0 / 3.0)
    w0sq = schedule.omega0.as_array() ** 2
    kv = HBAR * gas.alpha_s / (gas.mass * gas.initial_msq_sizes.as_array())
    b2 = b * b
    vals = (w0sq * (1.0 + traj.cq)[:, None] / (g23[:, None] * b2)
            - kv * sigma / b2 - bddot / b)
    vals_t = np.ascontiguousarray(vals.T)
    ders_t = np.ascontiguousarray(fd_derivative_uniform(vals, h).T)
    t0, t1 = float(t[0]), float(t[-1])

    def fn(tt):
        return hermite_eval(t0, h, vals_t, ders_t, tt)

    return DriveSchedule(kind="lcd-viscous-unitary", tau=schedule.tau,
                         _fn=fn, table=(t0, t1, vals_t, ders_t))


@dataclass(frozen=True)
class FeasibilityReport:
    """Where (if anywhere) a drive demands an expulsive potential."""

    feasible: bool
    min_omega2: AxisTriple           # rad^2/s^2, per axis
    time_of_min: AxisTriple          # s, per axis
    negative_intervals: dict         # axis label -> [(t_start, t_end), ...]
    grid_points: int


def feasibility_check(drive: DriveSchedule,
                      n: int = 10001) -> FeasibilityReport:
    """Scan Omega_j^2 on a dense grid; report negative stretches per axis.

    Interval endpoints are grid samples (resolution tau/(n-1)); the drive
    itself is never modified.
    """
    t = np.linspace(0.0, drive.tau, n)
    om2 = drive.omega2(t)
    imin = np.argmin(om2, axis=0)
    intervals: dict[str, list[tuple[float, float]]] = {}
    for j, axis in enumerate(AXES):
        mask = om2[:, j] < 0.0
        runs = []
        if np.any(mask):
            padded = np.concatenate([[False], mask, [False]])
            edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
            for a, bnd in zip(edges[::2], edges[1::2]):
                runs.append((float(t[a]), float(t[bnd - 1])))
        intervals[axis] = runs
    return FeasibilityReport(
        feasible=not any(intervals[a] for a in AXES),
        min_omega2=AxisTriple(*(float(om2[imin[j], j]) for j in range(3))),
        time_of_min=AxisTriple(*(float(t[imin[j]]) for j in range(3))),
        negative_intervals=intervals,
        grid_points=n,
    )
