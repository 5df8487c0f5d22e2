"""Exception types shared across the package."""


class PffracError(Exception):
    """Base class for package errors."""


class MeshFormatError(PffracError):
    """Malformed mesh file or inconsistent mesh data."""


class ConfigError(PffracError):
    """Invalid run configuration; carries file/line context in the message."""


class CoercivityError(PffracError):
    """Displacement solve requested without any Dirichlet boundary."""


class NonConvergenceError(PffracError):
    """Iteration cap exceeded; carries the best iterate found."""

    def __init__(self, message, best=None, stats=None, step=None):
        super().__init__(message)
        self.best = best
        self.stats = stats
        self.step = step


class InvariantViolation(PffracError):
    """A certified run invariant failed an audit; names the step."""
