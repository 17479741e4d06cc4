from .core import Logger, StructuredLogger, LEVELS

# shared by every twosex module; TWOSEX_LOG_LEVEL sets the min level, TWOSEX_LOG_FILE adds a file stream
logger = StructuredLogger()

__all__ = ["Logger", "StructuredLogger", "LEVELS", "logger"]
