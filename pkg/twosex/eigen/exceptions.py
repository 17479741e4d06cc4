from ..model.exceptions import TwosexError


class EigenError(TwosexError):
    pass


class StartDisagreement(EigenError):
    """Normalised iterations from different starts settled on different points."""

    def __init__(self, spread: float, limit: float):
        super().__init__(f"Start points disagree by {spread:.3g} (limit {limit:.3g})")
        self.spread = spread
        self.limit = limit
