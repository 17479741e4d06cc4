from .core import (
    COUNT_DTYPE,
    INTEGRABILITY_CAP,
    MeanMatrix,
    ModelSpec,
    ValidatedModel,
    ValidationReport,
    Violation,
    population_vector,
    real_vector,
    one_norm,
    mean_matrix,
    validate_model,
    require_valid,
    fingerprint,
)
from .exceptions import (
    TwosexError,
    DimensionMismatch,
    NonIntegrable,
    ZeroColumn,
    PopulationOverflow,
    ModelValidationError,
)

__all__ = [
    # Types
    "MeanMatrix",
    "ModelSpec",
    "ValidatedModel",
    "ValidationReport",
    "Violation",
    # Vectors
    "COUNT_DTYPE",
    "population_vector",
    "real_vector",
    "one_norm",
    # Operations
    "INTEGRABILITY_CAP",
    "mean_matrix",
    "validate_model",
    "require_valid",
    "fingerprint",
    # Exceptions
    "TwosexError",
    "DimensionMismatch",
    "NonIntegrable",
    "ZeroColumn",
    "PopulationOverflow",
    "ModelValidationError",
]
