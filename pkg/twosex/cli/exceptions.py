from ..model.exceptions import TwosexError


class CLIError(TwosexError):
    """Base exception for CLI-related errors."""

    pass


class ConfigError(CLIError):
    """The run configuration could not be read or failed its schema."""

    def __init__(self, message: str, errors: dict[str, list[str]] | None = None):
        self.errors = errors or {}
        if self.errors:
            detail = "; ".join(f"{key}: {' '.join(messages)}" for key, messages in sorted(self.errors.items()))
            message = f"{message} ({detail})"
        super().__init__(message)
