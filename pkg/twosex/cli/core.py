from typing import Callable
import sys
from ..log import logger
from ..model.exceptions import TwosexError
from ..operator.exceptions import InfiniteOperator
from .parsers import parse_command_args
from .formatters import HelpFormatter, OutputFormatter
from .exceptions import CLIError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFINITE = 2
EXIT_ASSERTION = 3


def exit_code(error: Exception) -> int:
    """Exit status for an error escaping a command."""
    if isinstance(error, InfiniteOperator):
        return EXIT_INFINITE
    return EXIT_USAGE


class CLI:
    def __init__(self, name: str = "cli"):
        self.name = name
        self.commands: dict[str, Callable] = {}

    def command(self, func: Callable | None = None, *, name: str | None = None) -> Callable:
        """Decorator to register a function as a CLI command."""

        def register(f: Callable) -> Callable:
            self.commands[name or f.__name__] = f
            return f

        return register(func) if func is not None else register

    def run(self, args: list[str] | None = None) -> int:
        """Run the CLI application; returns the process exit status."""
        if args is None:
            args = sys.argv[1:]

        if not args or args[0] in ("-h", "--help"):
            self.print_help()
            return EXIT_OK if args else EXIT_USAGE

        command_name = args[0]
        if command_name not in self.commands:
            logger.error(f"Unknown command: {command_name}")
            self.print_help()
            return EXIT_USAGE

        command = self.commands[command_name]
        try:
            parsed_args = parse_command_args(command, args[1:], prog=f"{self.name} {command_name}")
        except CLIError as e:
            logger.error(f"Error: {e}")
            self.print_command_help(command_name)
            return EXIT_USAGE
        except SystemExit as e:
            # argparse exits after printing --help
            return e.code or EXIT_OK

        try:
            result = command(**parsed_args)
        except TwosexError as e:
            logger.error(f"{type(e).__name__}: {e}")
            return exit_code(e)
        except (ValueError, OSError) as e:
            logger.error(f"{type(e).__name__}: {e}")
            return EXIT_USAGE
        return EXIT_OK if result is None else int(result)

    def print_help(self) -> None:
        """Print help information for the entire CLI."""
        help_text = HelpFormatter.format_cli_help(self.name, self.commands)
        print(help_text)

    def print_command_help(self, command_name: str) -> None:
        """Print help information for a specific command."""
        if command_name in self.commands:
            help_text = HelpFormatter.format_command_help(
                command_name, self.commands[command_name]
            )
            print(help_text)
        else:
            print(f"Unknown command: {command_name}")

    def echo(self, message: any) -> None:
        """Print a formatted message to the console."""
        formatted_output = OutputFormatter.format_output(message)
        print(formatted_output)
