"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """An iterative numerical procedure failed to converge."""


class SingularSystemError(RuntimeError):
    """A pivot block of the block-tridiagonal system is exactly singular."""

    def __init__(self, element, message=None):
        self.element = element
        super().__init__(message or f"singular pivot block at element {element}")


class ResourceLimitError(RuntimeError):
    """A requested discretization exceeds a configured resource cap."""


class ConfigError(ValueError):
    """A run configuration file or flag set failed validation."""
