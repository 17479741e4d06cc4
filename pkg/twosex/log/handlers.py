from datetime import datetime, UTC
from shutil import get_terminal_size as tsize
from threading import current_thread
from random import choice
from copy import deepcopy

from black import format_str, Mode
from pygments import highlight
from pygments.lexers import PythonLexer
from pygments.formatters import Terminal256Formatter as tformatter
from pygments.styles import get_style_by_name

from .utils import strip_ansi, to_plain, strip_repr_id, wrap, colorize


class Ruleset:

    def __init__(self, rules: dict[str, any], defaults: dict[str, any]):
        self._rules = self._merge_with_defaults(deepcopy(rules), deepcopy(defaults))
        for category, settings in self._rules.items():
            setattr(
                self,
                category,
                type(
                    f"{category.title().replace('_', '')}Rules", (), deepcopy(settings)
                )(),
            )

    @property
    def rules(self) -> dict[str, any]:
        return deepcopy(self._rules)

    def _merge_with_defaults(self, rules: dict[str, any], defaults: dict[str, any]):
        merged = defaults.copy()
        for category, settings in rules.items():
            if category in merged:
                merged[category].update(settings)
            else:
                merged[category] = settings
        return merged


class BaseHandler:

    def __init__(self, defaults: dict[str, any]):
        self.rulesets = {}
        self.previous_timestamp = None
        self.defaults = deepcopy(defaults)

    def modify(self, target: any, ruleset: dict[str, any]):
        if target not in self.rulesets:
            raise ValueError(f"Stream {target} not found in handler.")
        current_rules = self.rulesets[target].rules
        for category, settings in deepcopy(ruleset).items():
            current_rules.setdefault(category, {}).update(settings)
        self.rulesets[target] = Ruleset(current_rules, self.defaults)

    def should_log(self, message: str, level: int, ruleset: Ruleset) -> bool:
        if level < ruleset.filtering.min_level:
            return False
        if any(
            substring in message for substring in ruleset.filtering.exclude_messages
        ):
            return False
        return True

    def process_message(
        self,
        message: str,
        level: dict[str, str | int],
        metadata: dict[str, any],
        ruleset: Ruleset,
    ) -> str:
        terminal_width = tsize().columns
        timestamp = self._define_timestamp(ruleset)
        tag = f"{level['name']:<7}"
        prefix = f"{colorize(timestamp, dim=True)} {colorize(tag, level['color'])} "
        indent = len(strip_ansi(prefix))

        log_line = prefix if ruleset.formatting.ansi else strip_ansi(prefix)
        message_space = max(terminal_width - indent, 20)
        lines = wrap(message, message_space) or [""]
        if ruleset.metadata.show_metadata:
            lines[0] += self._generate_metadata(metadata, ruleset)

        body = lines[0] + "".join(f"\n{' ' * indent}{line}" for line in lines[1:])
        body = body if ruleset.formatting.ansi else strip_ansi(body)
        return f"{log_line}{body}\n"

    def _define_timestamp(self, ruleset: Ruleset) -> str:
        now = datetime.now(UTC if ruleset.timestamps.use_utc else None)
        timestamp = now.strftime("%H:%M:%S")
        if timestamp == self.previous_timestamp and not ruleset.timestamps.always_show:
            return " " * len(timestamp)
        self.previous_timestamp = timestamp
        return timestamp

    def _generate_metadata(self, metadata: dict[str, any], ruleset: Ruleset) -> str:
        items = []
        if ruleset.metadata.include_thread_name:
            items.append(f"[thr: {current_thread().name}]")
        if ruleset.metadata.include_module:
            items.append(f"[mod: {metadata.get('module', 'n/a')}]")
        if ruleset.metadata.include_function:
            items.append(f"[fnc: {metadata.get('function', 'n/a')}]")
        if ruleset.metadata.include_line_number:
            items.append(f"[ln: {metadata.get('line_number', 'n/a')}]")
        return colorize(" " + " ".join(items), dim=True) if items else ""


def pretty(value: any, ruleset: Ruleset, width: int = 80) -> str:
    """Pretty prints containers and arrays with black, highlighted by pygments."""
    repr_id = "".join(
        choice("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789")
        for _ in range(4)
    )
    plain = to_plain(value, repr_id)
    if not (ruleset.formatting.pretty_print and isinstance(plain, (list, dict, tuple))):
        return str(plain)
    formatted = strip_repr_id(
        format_str(
            str(plain),
            mode=Mode(
                line_length=(
                    ruleset.formatting.fixed_format_width
                    if ruleset.formatting.fixed_format_width > 0
                    else width
                )
            ),
        ),
        repr_id,
    ).rstrip("\n")
    if not (ruleset.formatting.ansi and ruleset.formatting.highlighting):
        return formatted
    return highlight(
        formatted, PythonLexer(), tformatter(style=get_style_by_name("one-dark"))
    ).rstrip("\n")


class StreamHandler(BaseHandler):

    def __init__(self, defaults: dict[str, any]):
        super().__init__(defaults)
        self.output_streams = []

    def add(self, stream: object, ruleset: dict[str, any] | None = None):
        if stream not in self.output_streams:
            self.output_streams.append(stream)
            self.rulesets[stream] = Ruleset(deepcopy(ruleset or {}), self.defaults)
        return stream

    def remove(self, stream: object):
        if stream in self.output_streams:
            self.output_streams.remove(stream)
            del self.rulesets[stream]

    def write(
        self, message: str, level_dict: dict[str, str | int], metadata: dict[str, any]
    ):
        for stream in self.output_streams:
            ruleset = self.rulesets[stream]
            if not self.should_log(message, level_dict["level"], ruleset):
                continue
            stream.write(self.process_message(message, level_dict, metadata, ruleset))
            stream.flush()


class FileHandler(BaseHandler):
    def __init__(self, defaults: dict[str, any]):
        super().__init__(defaults)
        self.file_streams = {}

    def add(
        self, file_path: str, ruleset: dict[str, any] | None = None, reset: bool = False
    ):
        if file_path not in self.file_streams or reset:
            self.file_streams[file_path] = open(file_path, "w" if reset else "a")
            self.rulesets[file_path] = Ruleset(deepcopy(ruleset or {}), self.defaults)
        return file_path

    def remove(self, file_path: str):
        if file_path in self.file_streams:
            self.file_streams.pop(file_path).close()
            del self.rulesets[file_path]

    def write(
        self, message: str, level_dict: dict[str, str | int], metadata: dict[str, any]
    ):
        for file_path, file_stream in self.file_streams.items():
            ruleset = self.rulesets[file_path]
            if not self.should_log(message, level_dict["level"], ruleset):
                continue
            processed = self.process_message(message, level_dict, metadata, ruleset)
            file_stream.write(strip_ansi(processed))
            file_stream.flush()


class Streams:
    def __init__(self, defaults: dict[str, any]):
        self.file = FileHandler(defaults)
        self.normal = StreamHandler(defaults)
