from textwrap import dedent
import numpy as np

EXIT_CODES = (
    (0, "success"),
    (1, "usage, configuration or model validation error"),
    (2, "the mean operator is infinite"),
    (3, "a statistical assertion failed"),
)

ENVIRONMENT = (
    ("TWOSEX_SEED", "seed used when --seed is absent"),
    ("TWOSEX_LOG_LEVEL", "minimum log level (debug, info, success, warning, error, lethal)"),
    ("TWOSEX_LOG_FILE", "also append the log to this file"),
)


class HelpFormatter:
    @staticmethod
    def format_option(args: tuple, kwargs: dict) -> str:
        line = f"  --{args[0]}" if kwargs.get("is_option") else f"  {', '.join(args)}"
        if "choices" in kwargs:
            line += f" {{{','.join(kwargs['choices'])}}}"
        if "help" in kwargs:
            line += f": {kwargs['help']}"
        if kwargs.get("required"):
            line += " (required)"
        elif kwargs.get("default") is not None:
            line += f" (default: {kwargs['default']})"
        return line

    @staticmethod
    def format_command_help(command_name: str, command: any) -> str:
        """Format help text for a single command."""
        help_text = [f"Command: {command_name}"]
        if command.__doc__:
            help_text.append(dedent(command.__doc__).strip())

        if hasattr(command, "_arguments"):
            help_text.append("\nOptions:")
            for args, kwargs in reversed(command._arguments):
                help_text.append(HelpFormatter.format_option(args, kwargs))

        return "\n".join(help_text)

    @staticmethod
    def format_cli_help(cli_name: str, commands: dict[str, any]) -> str:
        """Usage, commands, exit codes and environment variables."""
        help_text = [f"usage: {cli_name} <command> --config run.yaml [options]", "\ncommands:"]
        for name, command in commands.items():
            doc = command.__doc__.strip() if command.__doc__ else "no description"
            help_text.append(f"  {name}: {doc.split('\n')[0]}")
        help_text.append("\nexit codes:")
        help_text.extend(f"  {code}: {meaning}" for code, meaning in EXIT_CODES)
        help_text.append("\nenvironment:")
        help_text.extend(f"  {name}: {meaning}" for name, meaning in ENVIRONMENT)
        return "\n".join(help_text)


class OutputFormatter:
    @staticmethod
    def format_value(value: any) -> str:
        if isinstance(value, np.ndarray):
            value = value.tolist()
        if isinstance(value, float):
            return repr(value)
        if isinstance(value, (list, tuple)):
            return "[" + ", ".join(OutputFormatter.format_value(item) for item in value) + "]"
        return str(value)

    @staticmethod
    def format_output(output: any) -> str:
        """key=value lines for mappings, one line per item for sequences."""
        if isinstance(output, (list, tuple)):
            return "\n".join(map(str, output))
        elif isinstance(output, dict):
            return "\n".join(f"{k}={OutputFormatter.format_value(v)}" for k, v in output.items())
        else:
            return str(output)
