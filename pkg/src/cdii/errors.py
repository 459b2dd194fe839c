"""Package-level exception types."""


class CdiiError(Exception):
    """Base class for errors raised by this package."""


class SolverError(CdiiError, RuntimeError):
    """Linear solve failed to reach the required residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class LineSearchError(CdiiError, RuntimeError):
    """Backtracking exhausted its doubling budget."""


class ConfigError(CdiiError, ValueError):
    """Malformed or out-of-range configuration input."""
