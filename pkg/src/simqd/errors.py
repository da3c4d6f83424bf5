"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid scenario configuration: bad units, missing fields, unusable grids."""


class QuadratureError(RuntimeError):
    """A frequency integral failed to reach the requested tolerance."""

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class PrecisionError(RuntimeError):
    """A truncated-basis computation could not reach the requested accuracy."""
