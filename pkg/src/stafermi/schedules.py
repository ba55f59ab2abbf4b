"""Reference frequency schedules and adiabatic scale-factor paths.

The only reference family is the quintic smoothstep
p(s) = 10 s^3 - 15 s^4 + 6 s^5, whose value and first two derivatives
match the stationarity conditions at both endpoints exactly.  Every
derivative used downstream is analytic; nothing here is differentiated
numerically, because the counterdiabatic constructions consume the second
derivative and would amplify finite-difference noise into the drive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import FrequencyCrossesZero
from .model import AxisTriple, StrokeSpec


def smoothstep(s):
    """Quintic smoothstep p(s); p(0)=0, p(1)=1, p'(0)=p'(1)=p''(0)=p''(1)=0."""
    s = np.asarray(s, dtype=float)
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s))


def smoothstep_d1(s):
    """First derivative p'(s) = 30 s^2 (1-s)^2."""
    s = np.asarray(s, dtype=float)
    one_minus = 1.0 - s
    return 30.0 * s * s * one_minus * one_minus


def smoothstep_d2(s):
    """Second derivative p''(s) = 60 s (1-s) (1-2s)."""
    s = np.asarray(s, dtype=float)
    return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)


class PostStrokeMode(str, Enum):
    HOLD = "hold"        # omega_j(t > tau) = omega_j(tau)
    RELEASE = "release"  # omega_j(t > tau) = 0 (time of flight)


class ScheduleKind(str, Enum):
    REFERENCE = "reference"
    LCD = "lcd"


@dataclass(frozen=True)
class FrequencySchedule:
    """Per-axis trap frequency omega_j(t) and its first two derivatives.

    The shape is omega_j(t) = omega_{j,0} * [1 + (r_j - 1) p(t/tau)] with
    r_j = omega_j(tau)/omega_{j,0}; evaluation clamps s = t/tau to [0, 1],
    so Hold semantics come for free, and Release zeroes everything past tau.
    """

    omega0: AxisTriple       # rad/s at t = 0
    ratio: AxisTriple        # omega_j(tau) / omega_{j,0}
    tau: float               # s
    mode: PostStrokeMode = PostStrokeMode.HOLD
    kind: ScheduleKind = ScheduleKind.REFERENCE

    @property
    def omega_tau(self) -> AxisTriple:
        return AxisTriple(*(w * r for w, r in zip(self.omega0, self.ratio)))

    def _parts(self, t):
        t = np.asarray(t, dtype=float)
        s = np.clip(t / self.tau, 0.0, 1.0)
        released = (t > self.tau) if self.mode is PostStrokeMode.RELEASE else None
        return t, s, released

    def shape(self, t) -> np.ndarray:
        """Dimensionless shape g_j(t) = omega_j(t)/omega_{j,0}, shape (..., 3)."""
        t, s, released = self._parts(t)
        p = smoothstep(s)
        r = self.ratio.as_array()
        g = 1.0 + (r - 1.0) * p[..., None]
        if released is not None:
            g = np.where(released[..., None], 0.0, g)
        return g

    def omega(self, t) -> np.ndarray:
        """omega_j(t) in rad/s, shape (..., 3)."""
        return self.omega0.as_array() * self.shape(t)

    def domega(self, t) -> np.ndarray:
        """d omega_j / dt in rad/s^2, shape (..., 3)."""
        t, s, released = self._parts(t)
        dp = smoothstep_d1(s) / self.tau
        w0 = self.omega0.as_array()
        r = self.ratio.as_array()
        out = w0 * (r - 1.0) * dp[..., None]
        if released is not None:
            out = np.where(released[..., None], 0.0, out)
        return out

    def ddomega(self, t) -> np.ndarray:
        """d^2 omega_j / dt^2 in rad/s^3, shape (..., 3)."""
        t, s, released = self._parts(t)
        ddp = smoothstep_d2(s) / (self.tau * self.tau)
        w0 = self.omega0.as_array()
        r = self.ratio.as_array()
        out = w0 * (r - 1.0) * ddp[..., None]
        if released is not None:
            out = np.where(released[..., None], 0.0, out)
        return out

    def is_isotropic_shape(self, rel_tol: float = 1e-12) -> bool:
        """True when all axes share the same g_j(t); exact for equal ratios."""
        r = self.ratio.as_tuple()
        scale = max(abs(v) for v in r)
        return (max(r) - min(r)) <= rel_tol * scale


def smoothstep_frequency(spec: StrokeSpec,
                         mode: PostStrokeMode = PostStrokeMode.HOLD) -> FrequencySchedule:
    """Reference schedule meeting all six boundary conditions exactly."""
    ratio = AxisTriple(*(1.0 / (b * b) for b in spec.target_b))
    return FrequencySchedule(omega0=spec.omega0, ratio=ratio, tau=spec.tau,
                             mode=mode, kind=ScheduleKind.REFERENCE)


def _check_positive(schedule: FrequencySchedule, n: int = 1001) -> None:
    t = np.linspace(0.0, schedule.tau, n)
    w = schedule.omega(t)
    if np.any(w <= 0.0):
        i, j = np.unravel_index(int(np.argmin(w)), w.shape)
        raise FrequencyCrossesZero(
            f"omega_{'xyz'[j]}({t[i]:.6g} s) = {w[i, j]:.6g} rad/s <= 0; "
            "the adiabatic reference is undefined")


@dataclass(frozen=True)
class AdiabaticPath:
    """Instantaneous-adiabat scale factors of the unitary gas.

    b_j(t) = [omega_{j,0}/omega_j(t)] * sqrt(nu(t)/nu(0)) with
    nu = (omega_x omega_y omega_z)^{1/3}; derivatives follow analytically
    through the logarithmic rates u_j = omegadot_j/omega_j.
    """

    schedule: FrequencySchedule

    def _rates(self, t):
        w = self.schedule.omega(t)
        wd = self.schedule.domega(t)
        wdd = self.schedule.ddomega(t)
        u = wd / w
        udot = wdd / w - u * u
        return w, u, udot

    def b(self, t) -> np.ndarray:
        w = self.schedule.omega(t)
        w0 = self.schedule.omega0.as_array()
        q = np.prod(w, axis=-1) / np.prod(w0)
        return (w0 / w) * np.power(q, 1.0 / 6.0)[..., None]

    def bdot(self, t) -> np.ndarray:
        w, u, _ = self._rates(t)
        ell = -u + np.sum(u, axis=-1, keepdims=True) / 6.0
        return self.b(t) * ell

    def bddot(self, t) -> np.ndarray:
        w, u, udot = self._rates(t)
        ell = -u + np.sum(u, axis=-1, keepdims=True) / 6.0
        ell_dot = -udot + np.sum(udot, axis=-1, keepdims=True) / 6.0
        return self.b(t) * (ell_dot + ell * ell)

    def gamma(self, t) -> np.ndarray:
        """Gamma_ad(t) = prod_j b_j(t) = [nu(0)/nu(t)]^{3/2}."""
        w = self.schedule.omega(t)
        w0 = self.schedule.omega0.as_array()
        q = np.prod(w, axis=-1) / np.prod(w0)
        return np.power(q, -0.5)


def adiabatic_reference(schedule: FrequencySchedule) -> AdiabaticPath:
    """Closed-form adiabat b_j(t) for the unitary regime; b_j(0) = 1."""
    _check_positive(schedule)
    return AdiabaticPath(schedule)


@dataclass(frozen=True)
class ScalePath:
    """A desired per-axis scale-factor path b_j(t) with analytic derivatives.

    Used by the noninteracting inversion; the smoothstep variant runs from
    b_j(0) = 1 to the stroke target with stationary endpoints.
    """

    target_b: AxisTriple
    tau: float

    def _s(self, t):
        t = np.asarray(t, dtype=float)
        return np.clip(t / self.tau, 0.0, 1.0)

    def b(self, t) -> np.ndarray:
        delta = self.target_b.as_array() - 1.0
        return 1.0 + delta * smoothstep(self._s(t))[..., None]

    def bdot(self, t) -> np.ndarray:
        delta = self.target_b.as_array() - 1.0
        return delta * (smoothstep_d1(self._s(t)) / self.tau)[..., None]

    def bddot(self, t) -> np.ndarray:
        delta = self.target_b.as_array() - 1.0
        return delta * (smoothstep_d2(self._s(t)) / (self.tau * self.tau))[..., None]


def smoothstep_scale_path(spec: StrokeSpec) -> ScalePath:
    return ScalePath(target_b=spec.target_b, tau=spec.tau)
