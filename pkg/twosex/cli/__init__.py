from .core import CLI, EXIT_OK, EXIT_USAGE, EXIT_INFINITE, EXIT_ASSERTION
from .decorators import arg, kwarg, run_options
from .config import load_config, parse_config, resolve_seed, build_model, model_spec
from .commands import cli, cmd_eigen, cmd_simulate, cmd_experiment, main
from .exceptions import CLIError, ConfigError


__all__ = [
    # CLI()
    "CLI",
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_INFINITE",
    "EXIT_ASSERTION",
    # CLI().command decorators
    "arg",
    "kwarg",
    "run_options",
    # configuration
    "load_config",
    "parse_config",
    "resolve_seed",
    "build_model",
    "model_spec",
    # twosex commands
    "cli",
    "cmd_eigen",
    "cmd_simulate",
    "cmd_experiment",
    "main",
    # Exceptions
    "CLIError",
    "ConfigError",
]
