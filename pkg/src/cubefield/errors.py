"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class ResourceLimitError(RuntimeError):
    """A dense/enumerative path was requested beyond its size cap."""


class NumericError(RuntimeError):
    """A numerical procedure failed (singularity, divergence, lost precision)."""
