from .core import (
    MEvaluation,
    PFunctional,
    BatchEvaluation,
    scaled_image,
    eval_M,
    eval_M_batch,
    iterates,
    iterate_M,
    primitivity_index,
    eval_P,
    eval_P_batch,
    DEFAULT_TOL,
    DEFAULT_R_MAX,
    DIVERGE_CAP,
    POSITIVITY_FLOOR,
)
from .crosscheck import mean_growth_crosscheck
from .exceptions import (
    OperatorError,
    NotConverged,
    InfiniteOperator,
    NotPrimitive,
    NotPrimitiveWithin,
)

__all__ = [
    # Results
    "MEvaluation",
    "PFunctional",
    "BatchEvaluation",
    # Operations
    "scaled_image",
    "eval_M",
    "eval_M_batch",
    "iterates",
    "iterate_M",
    "primitivity_index",
    "eval_P",
    "eval_P_batch",
    "mean_growth_crosscheck",
    # Defaults
    "DEFAULT_TOL",
    "DEFAULT_R_MAX",
    "DIVERGE_CAP",
    "POSITIVITY_FLOOR",
    # Exceptions
    "OperatorError",
    "NotConverged",
    "InfiniteOperator",
    "NotPrimitive",
    "NotPrimitiveWithin",
]
