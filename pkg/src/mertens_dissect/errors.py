"""Exception hierarchy shared by all modules."""


class MertensError(Exception):
    """Base class for all library errors."""


class DomainError(MertensError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ResourceError(MertensError, RuntimeError):
    """A configured memory/combinatorial ceiling would be exceeded."""

    exit_code = 3


class PrecisionError(MertensError, ValueError):
    """The requested computation needs a higher working precision."""


class NearPoleError(DomainError):
    """An evaluation point is too close to a pole of the integrand."""
