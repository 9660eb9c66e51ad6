"""Exception types shared across the toolkit."""


class DataError(Exception):
    """Raised for unreadable, malformed, or inconsistent input data."""


class ConfigError(Exception):
    """Raised when a request is structurally valid but unsatisfiable
    (e.g. single-class training set, undersized class for k prototypes)."""
