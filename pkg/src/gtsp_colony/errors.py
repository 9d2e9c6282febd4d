"""Exception hierarchy shared by all modules."""


class GTSPError(Exception):
    """Base class for every error raised by this package."""


class InputError(GTSPError, ValueError):
    """Invalid argument or instance data."""


class ParseError(GTSPError, ValueError):
    """Malformed TSPLIB / GTSP text. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(GTSPError):
    """Instance too large for an exhaustive method."""


class ConfigError(GTSPError, ValueError):
    """Invalid or incomplete experiment configuration."""


class DomainError(GTSPError, ArithmeticError):
    """Statistic evaluated outside its mathematical domain."""
