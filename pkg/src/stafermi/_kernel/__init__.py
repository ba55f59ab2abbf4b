"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise
the pure-Python twin takes over.  Both implement the same `integrate`
entry point with identical floating-point behavior, so the choice affects
speed only.  `set_backend` exists for benchmarks and parity tests; normal
code never calls it.
"""

from __future__ import annotations

from . import _ode_py

try:  # pragma: no cover - depends on the build environment
    from . import _ode_cy
    _impl = _ode_cy
    BACKEND = "cython"
except ImportError:  # pragma: no cover
    _ode_cy = None
    _impl = _ode_py
    BACKEND = "python"

OK = _ode_py.OK
COLLAPSE = _ode_py.COLLAPSE
UNDERFLOW = _ode_py.UNDERFLOW

AVAILABLE = ("python",) if _ode_cy is None else ("python", "cython")


def set_backend(name: str) -> str:
    """Switch between 'cython' and 'python'; returns the active backend."""
    global _impl, BACKEND
    if name == "python":
        _impl, BACKEND = _ode_py, "python"
    elif name == "cython":
        if _ode_cy is None:
            raise RuntimeError("compiled kernel is not available")
        _impl, BACKEND = _ode_cy, "cython"
    else:
        raise ValueError(f"unknown backend {name!r}")
    return BACKEND


def integrate(*args):
    return _impl.integrate(*args)
