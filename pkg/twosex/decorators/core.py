import time
from collections import OrderedDict
from dataclasses import dataclass
from functools import wraps
from threading import Lock
from typing import Callable, TypeVar
import numpy as np
from ..log import logger

T = TypeVar("T")


def _freeze(value: any) -> any:
    """Hashable stand-in for arrays, models and nested containers."""
    if isinstance(value, np.ndarray):
        return ("ndarray", value.shape, value.dtype.str, value.tobytes())
    if isinstance(getattr(value, "fingerprint", None), str) and value.fingerprint:
        return ("model", value.fingerprint)
    if isinstance(value, (list, tuple)):
        return (type(value).__name__, tuple(_freeze(item) for item in value))
    if isinstance(value, dict):
        return ("dict", tuple(sorted((key, _freeze(item)) for key, item in value.items())))
    return value


def cache(
    func: Callable[..., T] | None = None, *, max_size: int | None = None
) -> Callable[..., T]:
    """Memoises on argument values; numpy arrays key by content, models by fingerprint."""

    def decorator(f: Callable[..., T]) -> Callable[..., T]:
        cache_dict: OrderedDict = OrderedDict()
        lock = Lock()

        @wraps(f)
        def wrapper_cache(*args: any, **kwargs: any) -> T:
            key = (_freeze(args), _freeze(kwargs))
            with lock:
                if key in cache_dict:
                    cache_dict.move_to_end(key)
                    return cache_dict[key]
            result = f(*args, **kwargs)
            with lock:
                cache_dict[key] = result
                if max_size is not None and len(cache_dict) > max_size:
                    cache_dict.popitem(last=False)  # oldest
            return result

        wrapper_cache.clear_cache = cache_dict.clear
        wrapper_cache.cache_size = lambda: len(cache_dict)

        return wrapper_cache

    if func is None:
        return decorator
    else:
        return decorator(func)


def timed(func: Callable[..., T]) -> Callable[..., T]:
    """Logs the wall-clock duration of every call at debug level."""

    @wraps(func)
    def wrapper_timed(*args: any, **kwargs: any) -> T:
        start_time = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            logger.debug(f"{func.__name__} finished", seconds=round(time.perf_counter() - start_time, 6))

    return wrapper_timed


@dataclass(frozen=True)
class CellFailure:
    """Stands in for the result of a call that raised one of the recorded exceptions."""

    error: str
    message: str

    def __bool__(self) -> bool:
        return False


def record_failures(
    *exceptions: type[BaseException],
) -> Callable[[Callable[..., T]], Callable[..., T | CellFailure]]:
    """Turns the listed exceptions into CellFailure values so sweeps keep going."""
    caught = exceptions or (Exception,)

    def decorator_record_failures(func: Callable[..., T]) -> Callable[..., T | CellFailure]:
        @wraps(func)
        def wrapper_record_failures(*args: any, **kwargs: any) -> T | CellFailure:
            try:
                return func(*args, **kwargs)
            except caught as e:
                logger.warning(f"{func.__name__} failed", error=type(e).__name__, message=str(e))
                return CellFailure(type(e).__name__, str(e))

        return wrapper_record_failures

    return decorator_record_failures
