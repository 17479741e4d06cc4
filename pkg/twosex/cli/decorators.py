from typing import Callable


def arg(*args, **kwargs):
    """Decorator to add an argument to a CLI command."""

    def decorator(func: Callable) -> Callable:
        if not hasattr(func, "_arguments"):
            func._arguments = []
        func._arguments.append((args, kwargs))
        return func

    return decorator


def kwarg(*args, **kwargs):
    """Decorator to add a keyword argument to a CLI command."""
    kwargs["is_option"] = True
    return arg(*args, **kwargs)


def run_options(func: Callable) -> Callable:
    """The flags every run command shares: --config, --seed, --out, --threads, --format."""
    for decorator in (
        kwarg("format", choices=("csv", "json"), default="csv", help="tabular artifact format"),
        kwarg("threads", type=int, default=None, help="worker threads (default: available cores)"),
        kwarg("out", default=None, help="output directory (default: config `output`)"),
        kwarg("seed", type=int, default=None, help="unsigned 64-bit seed; beats TWOSEX_SEED and the config"),
        kwarg("config", required=True, help="YAML run configuration"),
    ):
        func = decorator(func)
    return func
