from .core import (
    Criticality,
    EigenResult,
    certify_finite,
    solve_eigen,
    classify,
    growth_rate_via_norms,
    growth_rate_via_root,
    CRITICAL_BAND,
)
from .exceptions import EigenError, StartDisagreement

__all__ = [
    "Criticality",
    "EigenResult",
    "certify_finite",
    "solve_eigen",
    "classify",
    "growth_rate_via_norms",
    "growth_rate_via_root",
    "CRITICAL_BAND",
    # Exceptions
    "EigenError",
    "StartDisagreement",
]
