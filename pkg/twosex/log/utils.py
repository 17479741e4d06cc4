import re
from colorama import Fore
import numpy as np


def wrap(text: str, width: int) -> list:
    """Wraps text to the desired width.

    Args:
        text (str): Text to wrap.
        width (int): Width to wrap text to.

    Returns:
        list: A list of lines as they appear in the block of wrapped text.
    """
    result = []

    for line in text.split("\n"):
        current_line = ""
        current_line_visible_length = 0
        words = re.findall(r"\S+\s*", line)

        for word in words:
            word_visible_length = len(strip_ansi(word))

            if current_line_visible_length + word_visible_length > width:
                if current_line:
                    result.append(current_line.rstrip())
                current_line = ""
                current_line_visible_length = 0

            current_line += word
            current_line_visible_length += word_visible_length

        if current_line:
            result.append(current_line.rstrip())

    return result


def strip_ansi(text: str) -> str:
    """
    Remove ANSI escape sequences from a string.

    Args:
        text (str): The input string containing ANSI escape sequences.

    Returns:
        str: The input string with all ANSI escape sequences removed.
    """
    ansi_escape = re.compile(r"\x1B(?:[@-Z\\-_]|\[[0-?]*[ -/]*[@-~])")
    return ansi_escape.sub("", text)


def colorize(string: str, foreground: str | None = None, dim: bool = False) -> str:
    """Wraps a string in a colorama foreground color.

    Args:
        string (str): String to color.
        foreground (str | None): A colorama color name such as "green".
        dim (bool): Render the string dimmed.

    Returns:
        str: The inputted string with color formatting.
    """
    code = getattr(Fore, foreground.upper(), "") if foreground else ""
    return f"{code}{'\033[2m' if dim else ''}{string}\033[0m"


def to_plain(value: any, repr_id: str) -> str | int | bool | float | list | dict | tuple:
    """Converts numerical payloads into plain Python objects.

    Arrays become (nested) lists and numpy scalars become Python scalars so
    the value can be pretty printed. Anything else that is not a plain
    container is tagged with `repr_id` and rendered through its repr.

    Args:
        value (any): Object to sanitize.
        repr_id (str): An ID that identifies canonically altered strings.

    Returns:
        str | int | bool | float | list | dict | tuple: A sanitized object.
    """
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist(), repr_id)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, list):
        return [to_plain(item, repr_id) for item in value]
    if isinstance(value, dict):
        return {str(key): to_plain(item, repr_id) for key, item in value.items()}
    if isinstance(value, tuple):
        return tuple(to_plain(item, repr_id) for item in value)
    return f"{repr_id}{repr(value)}"


def strip_repr_id(string: str, repr_id: str) -> str:
    """Removes repr IDs from strings.

    Args:
        string (str): String to operate on.
        repr_id (str): Repr ID to remove.

    Returns:
        str: String without repr IDs.
    """
    return re.sub(
        rf'"{repr_id}(.*?)"', r"\1", re.sub(rf"'{repr_id}(.*?)'", r"\1", string)
    )


def format_fields(fields: dict[str, any]) -> str:
    """Renders structured fields as `key=value` pairs, arrays compacted."""
    parts = []
    for key, value in fields.items():
        if isinstance(value, np.ndarray):
            value = np.array2string(value, precision=6, separator=",")
        elif isinstance(value, float):
            value = f"{value:.8g}"
        parts.append(f"{key}={value}")
    return " ".join(parts)
