"""Scaling-dynamics integration for all three regimes.

Thin orchestration over the numerical kernel: compile the drive to a
kernel program, run the adaptive stepper, and wrap the sampled output in
a Trajectory.  All physics lives in the kernel's right-hand sides; all
schedule math lives in the designer modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernel
from .constants import HBAR
from .drives import DriveSchedule, constant_drive, zero_drive
from .errors import ScaleFactorCollapse, StepSizeUnderflow, ValidationError
from .model import GasSpec, Regime, ScalingState, StrokeSpec, Trajectory

COLLAPSE_EPS = 1e-6  # abort threshold on any scale factor

_REGIME_CODE = {Regime.NONINTERACTING: 0, Regime.UNITARY: 1,
                Regime.VISCOUS_UNITARY: 1}


@dataclass(frozen=True)
class IntegratorConfig:
    """Adaptive-stepper settings and the output sampling grid.

    ``output_grid`` is either a uniform sample count (endpoints included)
    or an explicit strictly-increasing list of times inside the window.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = math.inf
    output_grid: int | tuple | list = 201

    def __post_init__(self):
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_step <= 0.0:
            raise ValueError("max_step must be positive")

    def grid(self, t0: float, t1: float) -> np.ndarray:
        if isinstance(self.output_grid, int):
            if self.output_grid < 2:
                raise ValueError("need at least 2 output samples")
            return np.linspace(t0, t1, self.output_grid)
        g = np.asarray(self.output_grid, dtype=float)
        if g.ndim != 1 or g.size < 2:
            raise ValueError("output grid must be a 1-d list of at "
                             "least 2 times")
        if np.any(np.diff(g) <= 0.0):
            raise ValueError("output times must be strictly increasing")
        if g[0] < t0 or g[-1] > t1:
            raise ValueError("output times must lie within the "
                             f"integration window [{t0}, {t1}]")
        return g


def _default_gas(regime: Regime, spec: StrokeSpec) -> GasSpec:
    # Unit energy scale: dimensionless outputs (b, Q*, W/<H(0)>) are
    # unaffected; absolute sizes are only meaningful with a real GasSpec.
    return GasSpec(regime=regime, initial_energy=1.0).resolve(spec)


def _viscous_coefficients(gas: GasSpec):
    kv = HBAR * gas.alpha_s / (gas.mass * gas.initial_msq_sizes.as_array())
    crate = HBAR * gas.alpha_s / gas.virial_denominator
    return np.ascontiguousarray(kv, dtype=float), float(crate)


def _run(regime_code: int, y0, t0: float, t1: float, drive: DriveSchedule,
         spec: StrokeSpec, gas: GasSpec, cfg: IntegratorConfig,
         kv, crate) -> Trajectory:
    program = drive.to_program()
    if program.kind != 0 and not (program.t0 <= t0 and t1 <= program.t1):
        raise ValueError("drive table does not cover the integration window")
    grid = cfg.grid(t0, t1)
    out_y = np.full((grid.shape[0], 7), np.nan)
    w0sq = np.ascontiguousarray(spec.omega0.as_array() ** 2)
    y0 = np.asarray(y0, dtype=float)
    status, t_reached, yf, naccept, nreject, nfev = _kernel.integrate(
        regime_code, y0, float(t0), float(t1),
        program.kind, np.asarray(program.const, dtype=float),
        program.t0, program.t1, program.vals, program.ders,
        w0sq, np.asarray(kv, dtype=float), float(crate),
        float(cfg.rel_tol), float(cfg.abs_tol), float(cfg.max_step),
        COLLAPSE_EPS, grid, out_y)
    if status == _kernel.COLLAPSE:
        raise ScaleFactorCollapse(
            f"scale factor fell to the collapse guard {COLLAPSE_EPS:g} "
            f"at t = {t_reached:.9g} s", t=t_reached)
    if status == _kernel.UNDERFLOW:
        raise StepSizeUnderflow(
            f"step size underflow at t = {t_reached:.9g} s "
            f"(accepted {naccept}, rejected {nreject} steps)", t=t_reached)
    traj = Trajectory(spec=spec, gas=gas, t=grid,
                      b=out_y[:, 0:3], bdot=out_y[:, 3:6], cq=out_y[:, 6],
                      drive_omega2=drive.omega2(grid),
                      aux={"naccept": naccept, "nreject": nreject,
                           "nfev": nfev})
    return traj


_IDENTITY_Y0 = (1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0)
_NO_KV = np.zeros(3)


def _y0_of(initial_state: ScalingState | None):
    if initial_state is None:
        return _IDENTITY_Y0
    return (*initial_state.b.as_tuple(), *initial_state.bdot.as_tuple(),
            initial_state.cq)


def integrate_noninteracting(drive: DriveSchedule, spec: StrokeSpec,
                             cfg: IntegratorConfig | None = None,
                             gas: GasSpec | None = None,
                             initial_state: ScalingState | None = None,
                             ) -> Trajectory:
    """Uncoupled axes: bddot_j + Omega_j^2(t) b_j = omega_{j,0}^2 / b_j^3."""
    cfg = cfg or IntegratorConfig()
    gas = gas or _default_gas(Regime.NONINTERACTING, spec)
    return _run(0, _y0_of(initial_state), 0.0, drive.tau, drive, spec, gas,
                cfg, _NO_KV, 0.0)


def integrate_unitary(drive: DriveSchedule, spec: StrokeSpec,
                      cfg: IntegratorConfig | None = None,
                      gas: GasSpec | None = None,
                      initial_state: ScalingState | None = None) -> Trajectory:
    """Coupled axes: bddot_j + Omega_j^2(t) b_j = omega_{j,0}^2/(b_j Gamma^{2/3})."""
    cfg = cfg or IntegratorConfig()
    gas = gas or _default_gas(Regime.UNITARY, spec)
    return _run(1, _y0_of(initial_state), 0.0, drive.tau, drive, spec, gas,
                cfg, _NO_KV, 0.0)


def integrate_viscous(drive: DriveSchedule, spec: StrokeSpec, gas: GasSpec,
                      cfg: IntegratorConfig | None = None,
                      initial_state: ScalingState | None = None) -> Trajectory:
    """Unitary scaling ODE plus viscous stress damping and heating C_Q."""
    cfg = cfg or IntegratorConfig()
    if gas.regime is not Regime.VISCOUS_UNITARY:
        raise ValidationError([("ViscosityInWrongRegime",
                                "integrate_viscous requires regime "
                                f"'viscous-unitary', got '{gas.regime.value}'")])
    gas = gas.resolve(spec)
    kv, crate = _viscous_coefficients(gas)
    return _run(1, _y0_of(initial_state), 0.0, drive.tau, drive, spec, gas,
                cfg, kv, crate)


def tof_continuation(traj: Trajectory, gas: GasSpec, duration: float,
                     cfg: IntegratorConfig | None = None) -> Trajectory:
    """Extend a trajectory by free expansion (all drives off).

    Returns the full concatenated trajectory; viscous terms stay active
    when gas.regime is viscous-unitary, so C_Q keeps growing during an
    anisotropic time of flight.
    """
    cfg = cfg or IntegratorConfig()
    if duration <= 0.0:
        raise ValueError("TOF duration must be positive")
    end = traj.final_state()
    t0 = end.t
    gas = gas.resolve(traj.spec)
    regime_code = _REGIME_CODE[gas.regime]
    if gas.regime is Regime.VISCOUS_UNITARY:
        kv, crate = _viscous_coefficients(gas)
    else:
        kv, crate = _NO_KV, 0.0
    y0 = (*end.b.as_tuple(), *end.bdot.as_tuple(), end.cq)
    drive = zero_drive(duration)
    cont = _run(regime_code, y0, t0, t0 + duration, drive, traj.spec, gas,
                cfg, kv, crate)
    return traj.extended(cont)


def hold_continuation(traj: Trajectory, gas: GasSpec, duration: float,
                      omega_hold=None,
                      cfg: IntegratorConfig | None = None) -> Trajectory:
    """Extend a trajectory holding the trap at fixed frequencies
    (defaults to the stroke's final frequencies)."""
    cfg = cfg or IntegratorConfig()
    if duration <= 0.0:
        raise ValueError("hold duration must be positive")
    end = traj.final_state()
    t0 = end.t
    gas = gas.resolve(traj.spec)
    regime_code = _REGIME_CODE[gas.regime]
    if gas.regime is Regime.VISCOUS_UNITARY:
        kv, crate = _viscous_coefficients(gas)
    else:
        kv, crate = _NO_KV, 0.0
    y0 = (*end.b.as_tuple(), *end.bdot.as_tuple(), end.cq)
    omega_hold = omega_hold if omega_hold is not None else traj.spec.omega_tau
    drive = constant_drive(omega_hold, duration)
    cont = _run(regime_code, y0, t0, t0 + duration, drive, traj.spec, gas,
                cfg, kv, crate)
    return traj.extended(cont)
