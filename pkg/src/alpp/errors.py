"""Exception types shared across the package."""


class AlppError(Exception):
    """Base class for all package errors."""


class ConfigError(AlppError, ValueError):
    """Invalid configuration: bad grid, resolution too coarse, bad experiment settings."""

    exit_code = 2


class DomainError(AlppError, ValueError):
    """A query outside the domain of an operation (off-grid point, bad line range, ...)."""

    exit_code = 2


class ModelConsistencyError(AlppError, RuntimeError):
    """A simulated quantity violated an identity that holds exactly in the model.

    Raised e.g. when the difference profile decreases by more than its tolerance.
    """

    exit_code = 3
