from ..model.exceptions import TwosexError


class ExperimentError(TwosexError):
    pass


class UnknownExperiment(ExperimentError, KeyError):
    pass


class NoSurvivors(ExperimentError):
    """Every trial died before the horizon; survivor statistics are undefined."""

    def __init__(self, trials: int, horizon: int):
        super().__init__(f"All {trials} trials went extinct before generation {horizon}")
        self.trials = trials
        self.horizon = horizon


class PreconditionFailed(ExperimentError):
    pass


class OracleUnsupported(ExperimentError):
    """The exact oracle cannot handle this model (callback rows, too many types)."""

    pass
