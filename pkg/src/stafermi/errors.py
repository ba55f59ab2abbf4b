"""Exception hierarchy.

Every error raised by the package derives from StaError so callers can
catch one type at the boundary.  Validation failures carry the complete
list of issues found, not just the first one.
"""

from __future__ import annotations


class StaError(Exception):
    """Base class for all package errors."""


class ValidationError(StaError):
    """A specification failed validation.

    Attributes
    ----------
    issues : list[tuple[str, str]]
        (code, message) pairs, one per problem found.  Codes are stable
        machine-readable strings such as "NonPositiveFrequency".
    """

    def __init__(self, issues: list[tuple[str, str]]):
        self.issues = list(issues)
        lines = "; ".join(f"{code}: {msg}" for code, msg in self.issues)
        super().__init__(f"invalid specification ({lines})")


class DesignError(StaError):
    """A protocol cannot be constructed from the given inputs."""


class FrequencyCrossesZero(DesignError):
    """A counterdiabatic drive requires omega_j^2(t) < 0 somewhere.

    The squared frequency profile is still usable (the engine integrates
    it as an expulsive potential), so the offending schedule is attached.
    """

    def __init__(self, message: str, schedule=None):
        super().__init__(message)
        self.schedule = schedule


class NotIsotropicShape(DesignError):
    """An isotropic-only construction was handed an anisotropic trap."""


class ScaleFactorNonPositive(DesignError):
    """A desired scale-factor path touches zero; inversion is undefined."""


class NotIsotropic(StaError):
    """An isotropic-only observable was handed anisotropic data."""


class EngineError(StaError):
    """The integrator could not finish."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class ScaleFactorCollapse(EngineError):
    """A scale factor dropped to the collapse guard during integration."""


class StepSizeUnderflow(EngineError):
    """Adaptive step control shrank the step below the resolvable limit."""


class ImagingError(StaError):
    """Profile synthesis or fitting failed."""


class GridTooNarrow(ImagingError):
    """Requested grid does not cover +/-4 sigma of the model cloud."""


class FitDiverged(ImagingError):
    """Levenberg-Marquardt did not converge within the iteration budget."""


class DegenerateProfile(ImagingError):
    """Profile has no usable structure (too few samples or zero variance)."""
