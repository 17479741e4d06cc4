class TwosexError(Exception):
    """Base class of every error raised by twosex."""

    pass


class DimensionMismatch(TwosexError, ValueError):
    pass


class NonIntegrable(TwosexError):
    """An offspring mean estimate did not stabilise below the integrability cap."""

    def __init__(self, row: int, column: int, estimate: float, cap: float):
        super().__init__(
            f"Mean of V[{row},{column}] estimated at {estimate:.4g}, above the cap {cap:.4g}"
        )
        self.row = row
        self.column = column
        self.estimate = estimate


class ZeroColumn(TwosexError):
    """Some individual type is never produced (violates sum_i V[i,j] > 0)."""

    def __init__(self, columns: list[int]):
        super().__init__(
            f"Mean matrix column(s) {', '.join(map(str, columns))} sum to zero"
        )
        self.columns = columns


class PopulationOverflow(TwosexError, OverflowError):
    """A count left the 64-bit unsigned range."""

    pass


class ModelValidationError(TwosexError):
    def __init__(self, report):
        super().__init__(str(report))
        self.report = report
