"""Small numerical helpers on uniform grids.

Fourth-order finite differences and cumulative Simpson quadrature are
accurate enough (error ~ h^4) that, at the default 4097-node tables, they
sit far below every integrator tolerance in use.
"""

from __future__ import annotations

import numpy as np


def fd_derivative_uniform(y: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order derivative of samples on a uniform grid, along axis 0.

    Central five-point stencil inside, one-sided five-point at the edges;
    requires at least 5 samples.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if n < 5:
        raise ValueError("need at least 5 samples for the 4th-order stencil")
    d = np.empty_like(y)
    d[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)
    d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2]
            + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h)
    d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2]
            - 6.0 * y[3] + y[4]) / (12.0 * h)
    d[-2] = (3.0 * y[-1] + 10.0 * y[-2] - 18.0 * y[-3]
             + 6.0 * y[-4] - y[-5]) / (12.0 * h)
    d[-1] = (25.0 * y[-1] - 48.0 * y[-2] + 36.0 * y[-3]
             - 16.0 * y[-4] + 3.0 * y[-5]) / (12.0 * h)
    return d


def cumulative_simpson_uniform(y: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral of uniform samples, I[0] = 0, along axis 0.

    Composite Simpson on even indices; odd indices close the last interval
    with the three-point Newton-Cotes rule, keeping the whole prefix O(h^4).
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if n < 3:
        raise ValueError("need at least 3 samples")
    out = np.zeros_like(y)
    out[1] = (5.0 * y[0] + 8.0 * y[1] - y[2]) * (h / 12.0)
    # I[i] - I[i-2] over pairs of intervals, then prefix-sum the pairs
    even_chunks = (y[0:-2:2] + 4.0 * y[1:-1:2] + y[2::2]) * (h / 3.0)
    out[2::2] = np.cumsum(even_chunks, axis=0)
    # odd i >= 3: previous even value plus a backward 3-point close-out
    if n > 3:
        closeout = (5.0 * y[3::2] + 8.0 * y[2:-1:2] - y[1:-2:2]) * (h / 12.0)
        out[3::2] = out[2:-1:2] + closeout
    return out


def hermite_eval(t0: float, h: float, vals: np.ndarray, ders: np.ndarray, t):
    """Cubic Hermite interpolation of per-axis tables, clamped to the grid.

    ``vals`` and ``ders`` have shape (3, n); returns shape (..., 3).  The
    arithmetic mirrors the integration kernels' scalar evaluator exactly.
    """
    t = np.asarray(t, dtype=float)
    n = vals.shape[1]
    u = (t - t0) / h
    i = np.clip(u.astype(np.int64), 0, n - 2)
    th = np.clip(u - i, 0.0, 1.0)
    th2 = th * th
    th3 = th2 * th
    h00 = 2.0 * th3 - 3.0 * th2 + 1.0
    h10 = th3 - 2.0 * th2 + th
    h01 = -2.0 * th3 + 3.0 * th2
    h11 = th3 - th2
    p0 = vals[:, i]    # (3, ...)
    p1 = vals[:, i + 1]
    m0 = ders[:, i] * h
    m1 = ders[:, i + 1] * h
    out = h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1
    return np.moveaxis(out, 0, -1)
