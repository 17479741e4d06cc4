from ..model.exceptions import TwosexError, PopulationOverflow


class SimulationError(TwosexError):
    pass


class SamplingThresholdExceeded(SimulationError):
    """Too many couples of a type for per-couple draws and no exact superposition."""

    def __init__(self, couple_type: int, couples: int, threshold: int):
        super().__init__(
            f"{couples} couples of type {couple_type} exceed the per-couple threshold "
            f"{threshold}; enable normal_approximation to continue"
        )
        self.couple_type = couple_type
        self.couples = couples
        self.threshold = threshold


class UnknownOffspringKind(SimulationError, KeyError):
    pass


__all__ = [
    "SimulationError",
    "SamplingThresholdExceeded",
    "UnknownOffspringKind",
    "PopulationOverflow",
]
