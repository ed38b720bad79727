SERVER_ERROR = "Server error has occurred."
ILL_CONDITIONED = "%s is ill-conditioned (condition estimate %.3e exceeds %.1e)."
SINGULAR_MATRIX = "%s is singular (condition estimate %s)."
INVALID_NOISE = "Noise variance must be positive to evaluate a bound, got %s."
CONFIG_INVALID = "Invalid configuration: %s"


class InharmonicaError(Exception):
    """Base class for every error raised by the library."""


class ConfigurationError(InharmonicaError):
    pass


class NumericalError(InharmonicaError):
    """A computation hit a degenerate or ill-conditioned configuration."""

    def __init__(self, message: str, condition: float | None = None) -> None:
        super().__init__(message)
        self.condition = condition
