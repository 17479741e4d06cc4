from __future__ import annotations
from typing import Any
import numpy as np
from .core import Validator

inf = float("inf")


class Length(Validator):
    """Compares whether the length of the value is within the given range."""

    def __init__(
        self, min: int | None = None, max: int | None = None, err: str | None = None
    ):
        super().__init__(err)
        self.min = min if min is not None else -inf
        self.max = max if max is not None else inf

    def _validate(self, value: Any):
        if value is None:
            raise ValueError("Value is of None type.")
        if len(value) < self.min:
            raise ValueError(f"Minimum length is {self.min}.")
        if len(value) > self.max:
            raise ValueError(f"Maximum length is {self.max}.")


class Value(Validator):
    """Compares whether the value is within the given range."""

    def __init__(
        self,
        min: float | None = None,
        max: float | None = None,
        exclusive_min: bool = False,
        err: str | None = None,
    ):
        super().__init__(err)
        self.min = min if min is not None else -inf
        self.max = max if max is not None else inf
        self.exclusive_min = exclusive_min

    def _validate(self, value: Any):
        if value is None:
            raise ValueError("Value is of None type.")
        if self.exclusive_min and value <= self.min:
            raise ValueError(f"Value must be greater than {self.min}.")
        if value < self.min:
            raise ValueError(f"Minimum value is {self.min}.")
        if value > self.max:
            raise ValueError(f"Maximum value is {self.max}.")


class OneOf(Validator):
    """Accepts only the listed values."""

    def __init__(self, *choices: Any, err: str | None = None):
        super().__init__(err)
        self.choices = choices

    def _validate(self, value: Any):
        if value not in self.choices:
            raise ValueError(
                f"Unknown value {value!r}; expected one of {', '.join(map(str, self.choices))}."
            )


class Shape(Validator):
    """Checks that a (nested) list is a rectangular array of nonnegative finite numbers."""

    def __init__(self, ndim: int, err: str | None = None):
        super().__init__(err)
        self.ndim = ndim

    def _validate(self, value: Any):
        try:
            array = np.asarray(value, dtype=float)
        except (TypeError, ValueError):
            raise ValueError("Entries must form a rectangular numeric array.")
        if array.ndim != self.ndim:
            raise ValueError(f"Expected a {self.ndim}-dimensional array, got {array.ndim}.")
        if array.size == 0:
            raise ValueError("Array must not be empty.")
        if not np.all(np.isfinite(array)) or np.any(array < 0):
            raise ValueError("Entries must be finite and nonnegative.")
