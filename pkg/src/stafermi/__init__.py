"""Shortcut-to-adiabaticity expansion strokes for harmonically trapped
Fermi gases.

The package designs local counterdiabatic (LCD) trap-frequency drives,
integrates the scaling dynamics of noninteracting and unitary gases
(optionally with a viscous stress correction), and evaluates adiabaticity
and cloud-shape observables, including synthetic time-of-flight imaging.
"""

from . import _kernel
from ._kernel import set_backend as set_kernel_backend
from .constants import HBAR, KB, LI6_MASS, hz_to_rad, rad_to_hz
from .drives import (DriveSchedule, FeasibilityReport,
                     adiabatic_reference_trajectory, constant_drive,
                     feasibility_check, lcd_anisotropic_unitary,
                     lcd_isotropic_unitary, lcd_noninteracting,
                     lcd_viscous_unitary, reference_drive, zero_drive)
from .engine import (IntegratorConfig, hold_continuation,
                     integrate_noninteracting, integrate_unitary,
                     integrate_viscous, tof_continuation)
from .errors import (DesignError, EngineError, FitDiverged,
                     FrequencyCrossesZero, ImagingError, NotIsotropic,
                     NotIsotropicShape, ScaleFactorCollapse, StaError,
                     StepSizeUnderflow, ValidationError)
from .imaging import (GaussianFit, Profile, gaussian_fit, infer_in_trap_size,
                      model_gaussian, read_profile_csv, synthesize_profile,
                      write_profile_csv)
from .model import (AXES, AxisTriple, GasSpec, Regime, ScalingState,
                    StrokeSpec, Trajectory, identity_state, validate_spec)
from .observables import (ObservableRecord, cloud_sizes,
                          isotropic_q_star_drive_form, mean_energy_and_work,
                          observable_records, q_star_noninteracting,
                          q_star_noninteracting_axes, q_star_unitary,
                          trajectory_observables)
from .presets import PRESET_NAMES, fermi_energy_joules, preset_config
from .scenario import (Scenario, build_drive, expand_sweep, load_scenario,
                       parse_scenario, run_batch, run_scenario, run_sweep)
from .schedules import (AdiabaticPath, FrequencySchedule, PostStrokeMode,
                        ScalePath, ScheduleKind, adiabatic_reference,
                        smoothstep, smoothstep_frequency, smoothstep_scale_path)

__version__ = "0.1.0"


def get_kernel_backend() -> str:
    """Name of the active integration kernel ("cython" or "python")."""
    return _kernel.BACKEND

__all__ = [
    "AXES", "AxisTriple", "AdiabaticPath", "DesignError",
    "DriveSchedule", "EngineError", "FeasibilityReport", "FitDiverged",
    "FrequencyCrossesZero", "FrequencySchedule", "GasSpec", "GaussianFit",
    "HBAR", "ImagingError", "IntegratorConfig", "KB", "LI6_MASS",
    "NotIsotropic", "NotIsotropicShape", "ObservableRecord",
    "PostStrokeMode", "PRESET_NAMES",
    "Profile", "Regime", "ScaleFactorCollapse", "ScalePath", "ScalingState",
    "Scenario", "ScheduleKind", "StaError", "StepSizeUnderflow", "StrokeSpec",
    "Trajectory", "ValidationError", "adiabatic_reference",
    "adiabatic_reference_trajectory", "build_drive", "cloud_sizes",
    "constant_drive", "expand_sweep", "feasibility_check",
    "fermi_energy_joules", "gaussian_fit", "get_kernel_backend",
    "hold_continuation", "hz_to_rad",
    "identity_state", "infer_in_trap_size", "integrate_noninteracting",
    "integrate_unitary", "integrate_viscous", "isotropic_q_star_drive_form",
    "lcd_anisotropic_unitary", "lcd_isotropic_unitary",
    "lcd_noninteracting", "lcd_viscous_unitary", "load_scenario",
    "mean_energy_and_work", "model_gaussian", "observable_records",
    "parse_scenario", "preset_config", "q_star_noninteracting",
    "q_star_noninteracting_axes", "q_star_unitary", "rad_to_hz",
    "read_profile_csv", "reference_drive",
    "run_batch", "run_scenario", "run_sweep", "set_kernel_backend",
    "smoothstep", "smoothstep_frequency", "smoothstep_scale_path",
    "synthesize_profile", "tof_continuation", "trajectory_observables",
    "validate_spec", "write_profile_csv", "zero_drive",
]
