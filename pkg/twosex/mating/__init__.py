from .core import (
    MatingFunction,
    Identity,
    PerfectFidelity,
    Polygamous,
    PromiscuousSingle,
    CompletelyPromiscuous,
    MinOfLinear,
    Capped,
    CappedIdentity,
    CustomMating,
    build_mating,
    load_plugin,
    CATALOG_KINDS,
)
from .checks import CheckReport, Counterexample, check_superadditivity, check_monotonicity
from .exceptions import MatingError, UnverifiedMatingFunction, UnknownMatingKind

__all__ = [
    "MatingFunction",  # base class
    # Catalog
    "Identity",
    "PerfectFidelity",
    "Polygamous",
    "PromiscuousSingle",
    "CompletelyPromiscuous",
    "MinOfLinear",
    "Capped",
    "CappedIdentity",
    "CustomMating",
    "build_mating",
    "load_plugin",
    "CATALOG_KINDS",
    # Checks
    "CheckReport",
    "Counterexample",
    "check_superadditivity",
    "check_monotonicity",
    # Exceptions
    "MatingError",
    "UnverifiedMatingFunction",
    "UnknownMatingKind",
]
