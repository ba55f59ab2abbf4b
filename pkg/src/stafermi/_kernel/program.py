"""Kernel-ready drive descriptions.

The integration kernels understand exactly two drive forms: a per-axis
constant (exact for holds and time of flight) and a per-axis cubic Hermite
table on a uniform time grid.  Every analytic drive is compiled to a table
dense enough (default 4097 nodes) that the interpolation error sits around
1e-14 relative, far below integration tolerances.  Keeping the kernel
surface this small is what makes the compiled and pure-Python backends
bit-reproducible against each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KIND_CONSTANT = 0
KIND_TABLE = 1

DEFAULT_TABLE_NODES = 4097


@dataclass(frozen=True)
class DriveProgram:
    kind: int
    const: tuple[float, float, float]
    t0: float
    t1: float
    vals: np.ndarray  # (3, n) C-contiguous float64
    ders: np.ndarray  # (3, n) dOmega^2/dt at the nodes

    def omega2_at(self, t) -> np.ndarray:
        """Reference evaluation (numpy) matching the kernels' interpolant."""
        from ..numerics import hermite_eval
        t = np.asarray(t, dtype=float)
        if self.kind == KIND_CONSTANT:
            return np.broadcast_to(np.array(self.const),
                                   t.shape + (3,)).copy()
        h = (self.t1 - self.t0) / (self.vals.shape[1] - 1)
        return hermite_eval(self.t0, h, self.vals, self.ders, t)


_DUMMY = np.zeros((3, 2), dtype=float)
_DUMMY.flags.writeable = False


def constant_program(c: tuple[float, float, float], t0: float,
                     t1: float) -> DriveProgram:
    return DriveProgram(kind=KIND_CONSTANT, const=(float(c[0]), float(c[1]),
                                                   float(c[2])),
                        t0=float(t0), t1=float(t1), vals=_DUMMY, ders=_DUMMY)


def table_program(t0: float, t1: float, vals: np.ndarray,
                  ders: np.ndarray) -> DriveProgram:
    vals = np.ascontiguousarray(vals, dtype=float)
    ders = np.ascontiguousarray(ders, dtype=float)
    if vals.shape != ders.shape or vals.ndim != 2 or vals.shape[0] != 3:
        raise ValueError("tables must both have shape (3, n)")
    if vals.shape[1] < 2:
        raise ValueError("table needs at least 2 nodes")
    vals.flags.writeable = False
    ders.flags.writeable = False
    return DriveProgram(kind=KIND_TABLE, const=(0.0, 0.0, 0.0),
                        t0=float(t0), t1=float(t1), vals=vals, ders=ders)
