from .laws import (
    OffspringRow,
    PoissonRow,
    GeometricRow,
    DeterministicRow,
    EmpiricalRow,
    TotalThenThinRow,
    CallbackRow,
    OffspringLaw,
    build_row,
    build_offspring,
)
from .streams import TrialStreams, stream
from .core import (
    Trajectory,
    ExtinctionSummary,
    step,
    simulate,
    run_trials,
    batch_extinction,
    wilson_interval,
    COUPLE_THRESHOLD,
    ESCAPE_CAP,
)
from .checks import TransitivityReport, check_transitivity
from .exceptions import SimulationError, SamplingThresholdExceeded, UnknownOffspringKind

__all__ = [
    # Offspring laws
    "OffspringRow",  # base class
    "PoissonRow",
    "GeometricRow",
    "DeterministicRow",
    "EmpiricalRow",
    "TotalThenThinRow",
    "CallbackRow",
    "OffspringLaw",
    "build_row",
    "build_offspring",
    # Streams
    "TrialStreams",
    "stream",
    # Simulation
    "Trajectory",
    "ExtinctionSummary",
    "step",
    "simulate",
    "run_trials",
    "batch_extinction",
    "wilson_interval",
    "COUPLE_THRESHOLD",
    "ESCAPE_CAP",
    "TransitivityReport",
    "check_transitivity",
    # Exceptions
    "SimulationError",
    "SamplingThresholdExceeded",
    "UnknownOffspringKind",
]
