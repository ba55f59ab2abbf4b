"""Shared domain types: trap strokes, gas parameters, dynamical states.

Conventions enforced here and relied on everywhere else:

* frequencies are angular (rad/s); Hz appears only in the ``from_hz``
  constructors and the scenario configs,
* scale factors b_j are dimensionless ratios of rms cloud sizes,
* all types are immutable values, safe to share between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .constants import LI6_MASS, hz_to_rad
from .errors import ValidationError

AXES = ("x", "y", "z")


@dataclass(frozen=True)
class AxisTriple:
    """One scalar per trap axis j = x, y, z.  Units depend on use."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name, v in zip(AXES, (self.x, self.y, self.z)):
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"AxisTriple.{name} must be a finite number, got {v!r}")

    @classmethod
    def of(cls, value) -> "AxisTriple":
        """Coerce a scalar (broadcast to all axes) or a length-3 sequence."""
        if isinstance(value, AxisTriple):
            return value
        if isinstance(value, (int, float)):
            v = float(value)
            return cls(v, v, v)
        seq = tuple(float(c) for c in value)
        if len(seq) != 3:
            raise ValueError(f"expected 3 components, got {len(seq)}")
        return cls(*seq)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def __getitem__(self, key):
        if key in (0, "x"):
            return self.x
        if key in (1, "y"):
            return self.y
        if key in (2, "z"):
            return self.z
        raise KeyError(key)

    def map(self, fn) -> "AxisTriple":
        return AxisTriple(fn(self.x), fn(self.y), fn(self.z))

    def all_positive(self) -> bool:
        return self.x > 0.0 and self.y > 0.0 and self.z > 0.0

    def max_relative_spread(self) -> float:
        """max_j,k |v_j - v_k| / max_j |v_j|; zero for an exact triple."""
        hi = max(self.x, self.y, self.z)
        lo = min(self.x, self.y, self.z)
        scale = max(abs(self.x), abs(self.y), abs(self.z))
        if scale == 0.0:
            return 0.0
        return (hi - lo) / scale

    def is_isotropic(self, rel_tol: float = 1e-12) -> bool:
        return self.max_relative_spread() <= rel_tol


class Regime(str, Enum):
    """Interaction regime; selects the scaling equations of motion."""

    NONINTERACTING = "noninteracting"
    UNITARY = "unitary"
    VISCOUS_UNITARY = "viscous-unitary"


@dataclass(frozen=True)
class StrokeSpec:
    """The full problem statement for one trap stroke.

    ``omega0`` are the initial angular trap frequencies, ``target_b`` the
    nominal final scale factors, and ``tau`` the stroke duration.  The
    final frequencies follow from the nominal boundary condition
    omega_j(tau) = omega_{j,0} / b_j(tau)^2.  At unitarity the realized
    adiabatic factors differ from the nominal ones unless the stroke is
    isotropic in shape; the realized values come from the designer.
    """

    omega0: AxisTriple   # rad/s
    target_b: AxisTriple  # dimensionless
    tau: float           # s

    @classmethod
    def from_hz(cls, omega0_hz, tau: float, *, target_b=None,
                target_omega_hz=None) -> "StrokeSpec":
        """Build from Hz inputs; give exactly one of target_b / target_omega_hz."""
        if (target_b is None) == (target_omega_hz is None):
            raise ValueError("give exactly one of target_b or target_omega_hz")
        w0 = AxisTriple.of(omega0_hz).map(hz_to_rad)
        if target_b is not None:
            tb = AxisTriple.of(target_b)
        else:
            wt = AxisTriple.of(target_omega_hz).map(hz_to_rad)
            tb = AxisTriple(*(math.sqrt(a / b) for a, b in zip(w0, wt)))
        return cls(omega0=w0, target_b=tb, tau=float(tau))

    @property
    def omega_tau(self) -> AxisTriple:
        """Final frequencies omega_j(tau) = omega_{j,0} / b_j(tau)^2."""
        return AxisTriple(*(w / (b * b) for w, b in zip(self.omega0, self.target_b)))

    def is_identity(self) -> bool:
        return self.target_b.as_tuple() == (1.0, 1.0, 1.0)


@dataclass(frozen=True)
class GasSpec:
    """Gas parameters: regime, mass, energy scale, and viscous inputs.

    ``initial_msq_sizes`` <x_j^2>_0 and ``virial_denominator``
    <r . grad U>_0 may be left as None and filled by :meth:`resolve`,
    which applies the standard harmonic-virial closures at unitarity:
    <r . grad U>_0 = E and (1/2) m omega_{j,0}^2 <x_j^2>_0 = E/6.
    """

    regime: Regime
    initial_energy: float                       # J, <H(0)>
    mass: float = LI6_MASS                      # kg
    initial_msq_sizes: AxisTriple | None = None  # m^2, <x_j^2>_0
    alpha_s: float = 0.0                        # dimensionless <alpha_S>
    virial_denominator: float | None = None     # J, <r . grad U>_0

    def resolve(self, stroke: StrokeSpec) -> "GasSpec":
        """Fill the optional closures from the trap frequencies and energy."""
        msq = self.initial_msq_sizes
        if msq is None:
            e = self.initial_energy
            m = self.mass
            msq = AxisTriple(*(e / (3.0 * m * w * w) for w in stroke.omega0))
        vd = self.virial_denominator
        if vd is None:
            vd = self.initial_energy
        return replace(self, initial_msq_sizes=msq, virial_denominator=vd)

    def sigma0(self) -> AxisTriple:
        """Initial rms sizes sigma_j(0) = sqrt(<x_j^2>_0) in meters."""
        if self.initial_msq_sizes is None:
            raise ValueError("initial_msq_sizes not resolved; call resolve() first")
        return self.initial_msq_sizes.map(math.sqrt)


@dataclass(frozen=True)
class ScalingState:
    """Dynamical state at one instant: scale factors, rates, heating."""

    b: AxisTriple      # dimensionless
    bdot: AxisTriple   # 1/s
    cq: float          # dimensionless viscous heating coefficient C_Q
    t: float           # s

    @property
    def gamma(self) -> float:
        """Volume scaling factor Gamma = b_x b_y b_z."""
        return self.b.x * self.b.y * self.b.z

    @property
    def gamma_dot_over_gamma(self) -> float:
        return (self.bdot.x / self.b.x + self.bdot.y / self.b.y
                + self.bdot.z / self.b.z)

    def sigma_stress(self) -> AxisTriple:
        """Diagonal stress sigma_jj = 2 bdot_j/b_j - (2/3) Gammadot/Gamma."""
        trace_third = (2.0 / 3.0) * self.gamma_dot_over_gamma
        return AxisTriple(*(2.0 * v / b - trace_third
                            for v, b in zip(self.bdot, self.b)))


def identity_state(t: float = 0.0) -> ScalingState:
    return ScalingState(b=AxisTriple(1.0, 1.0, 1.0),
                        bdot=AxisTriple(0.0, 0.0, 0.0), cq=0.0, t=t)


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered samples of the scaling dynamics.

    Column layout: ``t`` (n,), ``b`` and ``bdot`` (n, 3) in axis order
    x, y, z, ``cq`` (n,), and ``drive_omega2`` (n, 3) recording the squared
    driving frequency actually applied at each sample time.  ``aux`` holds
    optional extra arrays (e.g. closed-form path accelerations).
    """

    spec: StrokeSpec
    gas: GasSpec
    t: np.ndarray
    b: np.ndarray
    bdot: np.ndarray
    cq: np.ndarray
    drive_omega2: np.ndarray
    aux: dict = None

    def __post_init__(self):
        object.__setattr__(self, "t", _frozen(self.t))
        object.__setattr__(self, "b", _frozen(self.b))
        object.__setattr__(self, "bdot", _frozen(self.bdot))
        object.__setattr__(self, "cq", _frozen(self.cq))
        object.__setattr__(self, "drive_omega2", _frozen(self.drive_omega2))
        if self.aux is None:
            object.__setattr__(self, "aux", {})
        n = self.t.shape[0]
        if not (self.b.shape == self.bdot.shape == (n, 3)
                and self.cq.shape == (n,) and self.drive_omega2.shape == (n, 3)):
            raise ValueError("inconsistent trajectory array shapes")
        if n > 1 and not np.all(np.diff(self.t) > 0.0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self) -> int:
        return self.t.shape[0]

    def state(self, i: int) -> ScalingState:
        return ScalingState(b=AxisTriple(*self.b[i]),
                            bdot=AxisTriple(*self.bdot[i]),
                            cq=float(self.cq[i]), t=float(self.t[i]))

    def final_state(self) -> ScalingState:
        return self.state(len(self) - 1)

    @property
    def gamma(self) -> np.ndarray:
        return self.b[:, 0] * self.b[:, 1] * self.b[:, 2]

    def sigma_stress(self) -> np.ndarray:
        """sigma_jj(t) at every sample, shape (n, 3)."""
        rates = self.bdot / self.b
        trace_third = (2.0 / 3.0) * rates.sum(axis=1, keepdims=True)
        return 2.0 * rates - trace_third

    def index_at(self, time: float) -> int:
        """Index of an exact grid time; refuses to interpolate silently."""
        i = int(np.searchsorted(self.t, time))
        for k in (i - 1, i, i + 1):
            if 0 <= k < len(self) and self.t[k] == time:
                return k
        raise KeyError(f"time {time!r} is not on the output grid")

    def extended(self, other: "Trajectory") -> "Trajectory":
        """Concatenate a continuation whose first sample repeats our last."""
        if not np.isclose(other.t[0], self.t[-1], rtol=0.0, atol=1e-15):
            raise ValueError("continuation must start where this trajectory ends")
        return Trajectory(
            spec=self.spec, gas=self.gas,
            t=np.concatenate([self.t, other.t[1:]]),
            b=np.concatenate([self.b, other.b[1:]]),
            bdot=np.concatenate([self.bdot, other.bdot[1:]]),
            cq=np.concatenate([self.cq, other.cq[1:]]),
            drive_omega2=np.concatenate([self.drive_omega2, other.drive_omega2[1:]]),
            aux={},
        )


def validate_spec(spec: StrokeSpec, gas: GasSpec) -> tuple[StrokeSpec, GasSpec]:
    """Check every type invariant; return the pair unchanged if all hold.

    Raises ValidationError carrying the complete list of (code, message)
    violations otherwise; validation never stops at the first problem.
    """
    issues: list[tuple[str, str]] = []
    for name, w in zip(AXES, spec.omega0):
        if w <= 0.0:
            issues.append(("NonPositiveFrequency",
                           f"omega0.{name} = {w!r} rad/s must be > 0"))
    for name, b in zip(AXES, spec.target_b):
        if b <= 0.0:
            issues.append(("NonPositiveFrequency",
                           f"target_b.{name} = {b!r} makes omega_j(tau) undefined"))
    if spec.tau <= 0.0:
        issues.append(("NonPositiveDuration", f"tau = {spec.tau!r} s must be > 0"))
    if gas.mass <= 0.0:
        issues.append(("NonPositiveMass", f"mass = {gas.mass!r} kg must be > 0"))
    if gas.alpha_s != 0.0 and gas.regime is not Regime.VISCOUS_UNITARY:
        issues.append(("ViscosityInWrongRegime",
                       f"alpha_s = {gas.alpha_s!r} requires regime "
                       f"'viscous-unitary', got '{gas.regime.value}'"))
    if gas.alpha_s < 0.0:
        issues.append(("ViscosityInWrongRegime",
                       f"alpha_s = {gas.alpha_s!r} must be >= 0"))
    if gas.initial_energy <= 0.0:
        issues.append(("NonPositiveEnergy",
                       f"initial_energy = {gas.initial_energy!r} J must be > 0"))
    if gas.initial_msq_sizes is not None:
        for name, s in zip(AXES, gas.initial_msq_sizes):
            if s <= 0.0:
                issues.append(("NonPositiveSize",
                               f"initial_msq_sizes.{name} = {s!r} m^2 must be > 0"))
    if gas.virial_denominator is not None and gas.virial_denominator <= 0.0:
        issues.append(("NonPositiveEnergy",
                       f"virial_denominator = {gas.virial_denominator!r} J must be > 0"))
    if issues:
        raise ValidationError(issues)
    return spec, gas
