"""Physical constants and unit conversions.

All frequencies are stored internally in rad/s.  Configuration files and
the built-in presets quote trap frequencies in Hz; the conversion happens
exactly once at the interface boundary.
"""

import math

# CODATA 2018
HBAR = 1.054571817e-34  # J s
KB = 1.380649e-23       # J/K

# 6Li atom, the default species (overridable through GasSpec.mass)
LI6_MASS = 9.98834e-27  # kg

TWO_PI = 2.0 * math.pi


def hz_to_rad(f_hz: float) -> float:
    """Convert an ordinary frequency in Hz to an angular frequency in rad/s."""
    return TWO_PI * f_hz


def rad_to_hz(omega: float) -> float:
    """Convert an angular frequency in rad/s back to Hz."""
    return omega / TWO_PI
