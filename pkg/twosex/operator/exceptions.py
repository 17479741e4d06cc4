import numpy as np
from ..model.exceptions import TwosexError


class OperatorError(TwosexError):
    pass


class NotConverged(OperatorError):
    """An iteration hit its budget; `gap` and the partial `value` are kept."""

    def __init__(self, message: str, gap: float, value=None):
        super().__init__(f"{message} (gap {gap:.3g})")
        self.gap = gap
        self.value = None if value is None else np.asarray(value)


class InfiniteOperator(OperatorError):
    """Some component of M(z) diverged at the sampled point z."""

    def __init__(self, point, components):
        self.point = np.asarray(point, dtype=float)
        self.components = tuple(int(c) for c in components)
        super().__init__(
            f"M is infinite at z={np.round(self.point, 6).tolist()} in component(s) {list(self.components)}"
        )


class NotPrimitive(OperatorError):
    pass


class NotPrimitiveWithin(NotPrimitive):
    def __init__(self, n_max: int, basis: int | None = None):
        detail = f"; M^n(e_{basis}) keeps a zero component" if basis is not None else ""
        super().__init__(f"M is not primitive within {n_max} iterations{detail}")
        self.n_max = n_max
        self.basis = basis
