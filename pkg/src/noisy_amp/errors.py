"""Exception types shared across the package."""


class NoisyAmpError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(NoisyAmpError):
    """An argument is outside its documented domain."""


class DimensionMismatch(NoisyAmpError):
    """Objects with incompatible Fock-space dimensions were combined."""


class TruncationError(NoisyAmpError):
    """The truncated basis cannot hold the requested state to tolerance.

    Raised when probability mass beyond the cutoff exceeds the space's
    ``trunc_tol``; the remedy is to rebuild with a larger ``dim``.
    """


class ZeroTrace(NoisyAmpError):
    """A conditional state has (numerically) zero success weight."""


class NoBracket(NoisyAmpError):
    """A root-finding bracket does not contain the requested target value."""
