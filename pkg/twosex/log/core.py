from inspect import currentframe, getmodule
from os import environ
import sys
from .handlers import Ruleset, Streams, pretty
from .utils import format_fields

LEVELS = {
    "debug": {"name": "debug", "level": 0, "color": "blue"},
    "info": {"name": "info", "level": 1, "color": "white"},
    "success": {"name": "success", "level": 2, "color": "green"},
    "warning": {"name": "warning", "level": 3, "color": "yellow"},
    "error": {"name": "error", "level": 4, "color": "red"},
    "lethal": {"name": "lethal", "level": 5, "color": "magenta"},
}


def level_from_env(default: str = "info") -> int:
    """Reads the minimum level from TWOSEX_LOG_LEVEL, falling back to `default`."""
    name = environ.get("TWOSEX_LOG_LEVEL", default).strip().lower()
    return LEVELS.get(name, LEVELS[default])["level"]


class Logger:
    def __init__(self, ruleset: dict | None = None, stream: object | None = None):
        self.defaults = {
            "timestamps": {
                "always_show": False,
                "use_utc": False,
            },
            "formatting": {
                "ansi": True,
                "highlighting": True,
                "pretty_print": True,
                "fixed_format_width": 0,
            },
            "filtering": {
                "min_level": level_from_env(),
                "exclude_messages": [],
            },
            "output": {
                "default_file_stream": environ.get("TWOSEX_LOG_FILE") or None,
            },
            "metadata": {
                "show_metadata": False,
                "include_thread_name": True,
                "include_module": False,
                "include_function": True,
                "include_line_number": False,
            },
        }

        rules = {category: dict(settings) for category, settings in self.defaults.items()}
        for category, settings in (ruleset or {}).items():
            rules.setdefault(category, {}).update(settings)

        self.ruleset = Ruleset(rules, self.defaults)
        self.stream = Streams(self.defaults)

        if self.ruleset.output.default_file_stream:
            self.stream.file.add(self.ruleset.output.default_file_stream, ruleset=rules)

        self.stream.normal.add(stream if stream is not None else sys.stderr, ruleset=rules)

    def set_level(self, name: str):
        """Changes the minimum level on every attached stream."""
        level = LEVELS[name]["level"]
        for handler in (self.stream.normal, self.stream.file):
            for target in list(handler.rulesets):
                handler.modify(target, {"filtering": {"min_level": level}})

    def _log(
        self,
        level: str,
        values: tuple,
        sep: str = " ",
        fields: dict | None = None,
    ):
        frame = currentframe().f_back.f_back
        metadata = {
            "module": getmodule(frame).__name__ if getmodule(frame) else "n/a",
            "function": frame.f_code.co_name,
            "line_number": frame.f_lineno,
            "level": level,
        }

        message = sep.join(pretty(value, self.ruleset) for value in values)
        if fields:
            message += f" {format_fields(fields)}"

        self.stream.normal.write(message, LEVELS[level], metadata)
        self.stream.file.write(message, LEVELS[level], metadata)

    def debug(self, *values, sep: str = " "):
        self._log("debug", values, sep)

    def info(self, *values, sep: str = " "):
        self._log("info", values, sep)

    def success(self, *values, sep: str = " "):
        self._log("success", values, sep)

    def warning(self, *values, sep: str = " "):
        self._log("warning", values, sep)

    def error(self, *values, sep: str = " "):
        self._log("error", values, sep)

    def lethal(self, *values, sep: str = " "):
        self._log("lethal", values, sep)


class StructuredLogger(Logger):
    """Logger whose level methods accept `key=value` fields appended to the line."""

    def debug(self, *values, sep: str = " ", **fields):
        self._log("debug", values, sep, fields=fields)

    def info(self, *values, sep: str = " ", **fields):
        self._log("info", values, sep, fields=fields)

    def success(self, *values, sep: str = " ", **fields):
        self._log("success", values, sep, fields=fields)

    def warning(self, *values, sep: str = " ", **fields):
        self._log("warning", values, sep, fields=fields)

    def error(self, *values, sep: str = " ", **fields):
        self._log("error", values, sep, fields=fields)

    def lethal(self, *values, sep: str = " ", **fields):
        self._log("lethal", values, sep, fields=fields)
