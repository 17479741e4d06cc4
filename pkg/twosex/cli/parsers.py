from typing import Any, Callable
import argparse
from .exceptions import CLIError


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(message)


class CommandParser:
    def __init__(self, command: Callable, prog: str | None = None):
        self.command = command
        self.parser = ArgumentParser(prog=prog, description=command.__doc__)
        self._add_arguments()

    def _add_arguments(self):
        for args, kwargs in getattr(self.command, "_arguments", []):
            self._add_argument(*args, **dict(kwargs))

    def _add_argument(self, *args, **kwargs):
        # Remove custom parameters that argparse doesn't understand
        is_flag = kwargs.pop("is_flag", False)
        is_option = kwargs.pop("is_option", False)

        if is_flag:
            kwargs["action"] = "store_true"
            kwargs.setdefault("default", False)

        if is_option and not args[0].startswith("-"):
            args = (f"--{args[0]}",) + args[1:]

        self.parser.add_argument(*args, **kwargs)

    def parse_args(self, args: list[str]) -> dict[str, Any]:
        return vars(self.parser.parse_args(args))


def parse_command_args(command: Callable, args: list[str], prog: str | None = None) -> dict[str, Any]:
    """Parses `args` against the command's declared arguments; raises CLIError on bad usage."""
    return CommandParser(command, prog).parse_args(args)
