from .core import (
    # decorators
    cache,
    timed,
    record_failures,
    # result types
    CellFailure,
)

__all__ = [
    # decorators
    "cache",
    "timed",
    "record_failures",
    # result types
    "CellFailure",
]
