"""Multistate Landau-Zener workbench.

Numerically exact propagation of linear-sweep Hamiltonians,
semiclassical path sums over level crossings, and the closed-form
transition matrix of the six-state interference preset.
"""

from .analytic import (
    PresetParams,
    exact_matrix,
    interference_model,
    lz_probability,
    minigap_model,
)
from .errors import (
    DegenerateSlopeCoupling,
    DuplicateLevel,
    EigensolverNoConvergence,
    HermiticityViolation,
    MlzError,
    ModelFormatError,
    NonpositiveSlopeGap,
    NormDrift,
    NotConverged,
    PathExplosion,
    SimultaneousSharedCrossing,
    StepUnderflow,
    UnitarityViolation,
)
from .eigen import jacobi_eigh
from .model import (
    CrossingEvent,
    MlzModel,
    SpectrumSample,
    adiabatic_spectrum,
    find_crossings,
    hamiltonian_at,
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
    validate_model,
)
from .propagator import (
    ConvergedProbabilities,
    IntegratorConfig,
    IntegratorStats,
    ScatteringResult,
    StateVector,
    converged_probabilities,
    propagate,
    scattering_matrix,
)
from .semiclassical import (
    SemiclassicalPath,
    SemiclassicalResult,
    enumerate_paths,
    path_amplitude,
    semiclassical_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "CrossingEvent",
    "ConvergedProbabilities",
    "DegenerateSlopeCoupling",
    "DuplicateLevel",
    "EigensolverNoConvergence",
    "HermiticityViolation",
    "IntegratorConfig",
    "IntegratorStats",
    "MlzError",
    "MlzModel",
    "ModelFormatError",
    "NonpositiveSlopeGap",
    "NormDrift",
    "NotConverged",
    "PathExplosion",
    "PresetParams",
    "ScatteringResult",
    "SemiclassicalPath",
    "SemiclassicalResult",
    "SimultaneousSharedCrossing",
    "SpectrumSample",
    "StateVector",
    "StepUnderflow",
    "UnitarityViolation",
    "adiabatic_spectrum",
    "converged_probabilities",
    "enumerate_paths",
    "exact_matrix",
    "find_crossings",
    "hamiltonian_at",
    "interference_model",
    "jacobi_eigh",
    "load_model",
    "lz_probability",
    "minigap_model",
    "model_from_dict",
    "model_to_dict",
    "path_amplitude",
    "propagate",
    "save_model",
    "scattering_matrix",
    "semiclassical_matrix",
    "validate_model",
]
