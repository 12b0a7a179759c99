"""Exception hierarchy."""


class WidebandError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(WidebandError, ValueError):
    """An argument lies outside the domain of the function."""


class InvalidChannelError(WidebandError, ValueError):
    """A channel violates the regularity assumptions (c1 > 0, c2 < 0)."""


class NoSolutionError(WidebandError, ValueError):
    """Requested Eb/N0 is below the Shannon limit."""


class OutOfRangeError(WidebandError, ValueError):
    """Root bracketing ran past the end of a tabulated model's domain."""


class ConvergenceError(WidebandError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""
