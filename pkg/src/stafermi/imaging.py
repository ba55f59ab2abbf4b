"""Synthetic measurement chain: 1-D Gaussian profiles and their fits.

The model is the experimental fit function A0 + A1 exp(-x^2/sigma^2);
sigma is the 1/e half-width, NOT a standard deviation (no factor 2 in the
exponent).  That convention is used consistently everywhere here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateProfile, FitDiverged, GridTooNarrow
from .model import Trajectory


@dataclass(frozen=True)
class Profile:
    """A 1-D cut through the cloud: positions [m] and signal amplitudes."""

    x: np.ndarray
    values: np.ndarray
    axis: str = "x"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)
        if x.ndim != 1 or x.shape != v.shape:
            raise ValueError("x and values must be equal-length 1-d arrays")
        if x.size >= 2 and not np.all(np.diff(x) > 0.0):
            raise ValueError("positions must be strictly increasing")


@dataclass(frozen=True)
class GaussianFit:
    a0: float
    a1: float
    sigma: float           # m, 1/e half-width
    residual_norm: float   # L2 norm of (model - data)
    converged: bool
    n_iter: int


def model_gaussian(x, a0: float, a1: float, sigma: float):
    return a0 + a1 * np.exp(-(x * x) / (sigma * sigma))


def synthesize_profile(sigma_true: float, a0: float = 0.0, a1: float = 1.0,
                       half_width: float | None = None, n: int = 201,
                       snr: float | None = None, seed: int = 0,
                       axis: str = "x") -> Profile:
    """Deterministic synthetic profile; optional additive white noise.

    The grid spans [-half_width, +half_width] (default 5 sigma) and must
    cover at least +-4 sigma.  ``snr`` is peak amplitude over noise
    standard deviation; the RNG is seeded per call, never global.
    """
    if sigma_true <= 0.0:
        raise ValueError("sigma_true must be positive")
    if half_width is None:
        half_width = 5.0 * sigma_true
    if half_width < 4.0 * sigma_true:
        raise GridTooNarrow(
            f"grid spans +-{half_width / sigma_true:.3g} sigma; "
            "need at least +-4 sigma")
    x = np.linspace(-half_width, half_width, n)
    values = model_gaussian(x, a0, a1, sigma_true)
    if snr is not None:
        rng = np.random.default_rng(seed)
        values = values + (a1 / snr) * rng.standard_normal(n)
    return Profile(x=x, values=values, axis=axis)


def _initial_guess(x: np.ndarray, y: np.ndarray):
    a0 = float(np.min(y))
    a1 = float(np.max(y) - np.min(y))
    w = y - a0
    total = float(np.sum(w))
    if total > 0.0:
        m2 = float(np.sum(w * x * x) / total)
    else:
        m2 = 0.0
    if m2 > 0.0:
        # second moment of exp(-x^2/s^2) is s^2/2
        sigma = math.sqrt(2.0 * m2)
    else:
        sigma = float(x[-1] - x[0]) / 4.0
    return a0, a1, sigma


def gaussian_fit(profile: Profile, initial_guess=None, max_iter: int = 200,
                 step_tol: float = 1e-8) -> GaussianFit:
    """Damped least squares for (A0, A1, sigma).

    Levenberg damping starts at 1e-3, divides by 10 on a cost decrease and
    multiplies by 10 otherwise; convergence is a relative parameter step
    below ``step_tol`` within ``max_iter`` iterations.
    """
    x = profile.x
    y = profile.values
    if x.size < 8:
        raise DegenerateProfile(f"need at least 8 samples, got {x.size}")
    if float(np.max(y) - np.min(y)) == 0.0:
        raise DegenerateProfile("profile has zero variance")
    if initial_guess is None:
        a0, a1, sigma = _initial_guess(x, y)
    else:
        a0, a1, sigma = (float(v) for v in initial_guess)
    if sigma == 0.0 or a1 == 0.0:
        raise DegenerateProfile("degenerate initial guess")

    lam = 1e-3
    r = model_gaussian(x, a0, a1, sigma) - y
    cost = float(r @ r)
    n_iter = 0
    converged = False
    while n_iter < max_iter:
        n_iter += 1
        e = np.exp(-(x * x) / (sigma * sigma))
        jac = np.empty((x.size, 3))
        jac[:, 0] = 1.0
        jac[:, 1] = e
        jac[:, 2] = a1 * e * (2.0 * x * x / (sigma ** 3))
        jtj = jac.T @ jac
        jtr = jac.T @ r
        damped = jtj + lam * np.diag(np.diag(jtj))
        try:
            delta = np.linalg.solve(damped, -jtr)
        except np.linalg.LinAlgError:
            lam *= 10.0
            if lam > 1e12:
                raise FitDiverged("normal equations stayed singular")
            continue
        trial = (a0 + delta[0], a1 + delta[1], sigma + delta[2])
        rt = model_gaussian(x, *trial) - y
        cost_t = float(rt @ rt)
        if not math.isfinite(cost_t):
            lam *= 10.0
            if lam > 1e12:
                raise FitDiverged("cost diverged to non-finite values")
            continue
        rel_step = max(abs(delta[i]) / max(abs(p), 1e-300)
                       for i, p in enumerate((a0, a1, sigma)))
        if cost_t < cost:
            a0, a1, sigma = trial
            r = rt
            cost = cost_t
            lam = max(lam / 10.0, 1e-15)
            if rel_step < step_tol:
                converged = True
                break
        else:
            if rel_step < step_tol:
                # the damped step is already negligible: at the minimum
                converged = True
                break
            lam *= 10.0
            if lam > 1e12:
                raise FitDiverged("no cost decrease and damping saturated")
    return GaussianFit(a0=float(a0), a1=float(a1), sigma=float(abs(sigma)),
                       residual_norm=float(math.sqrt(cost)),
                       converged=converged, n_iter=n_iter)


def infer_in_trap_size(observed: GaussianFit, tof_traj: Trajectory,
                       axis: str = "x", t: float | None = None) -> float:
    """Undo the time-of-flight expansion: sigma_in = sigma_obs / b_j(t_tof).

    ``tof_traj`` is an extended trajectory whose final sample (or the
    sample at the exact grid time ``t``) is the imaging instant.
    """
    j = {"x": 0, "y": 1, "z": 2}[axis]
    i = len(tof_traj) - 1 if t is None else tof_traj.index_at(t)
    b = float(tof_traj.b[i, j])
    if b <= 0.0:
        raise ValueError(f"nonpositive expansion factor b = {b!r}")
    return observed.sigma / b


def write_profile_csv(profile: Profile, path) -> None:
    """Two-column CSV (position, value) with a one-line header."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("position_m,value\n")
        for xi, vi in zip(profile.x, profile.values):
            # repr of the builtin float round-trips exactly; numpy scalar
            # reprs do not parse back
            fh.write(f"{float(xi)!r},{float(vi)!r}\n")


def read_profile_csv(path, axis: str = "x") -> Profile:
    xs: list[float] = []
    vs: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if header.count(",") != 1:
            raise ValueError("expected a two-column CSV with one header line")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            a, b = line.split(",")
            xs.append(float(a))
            vs.append(float(b))
    return Profile(x=np.asarray(xs), values=np.asarray(vs), axis=axis)
