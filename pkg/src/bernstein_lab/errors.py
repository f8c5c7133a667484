"""Exception hierarchy.

Numerical failures map to exit code 2 on the command line, malformed input
to exit code 1.
"""


class BernsteinLabError(Exception):
    """Base class for every error raised by the library."""

    exit_code = 1


class NumericalError(BernsteinLabError):
    """A numerical procedure failed to reach its tolerance."""

    exit_code = 2


class NonConvergence(NumericalError):
    """Quadrature, excision or iteration budget exhausted before tolerance was met."""


class GrowthOverflow(NumericalError, OverflowError):
    """Naive evaluation requested beyond the double-precision exponent range."""


class InputError(BernsteinLabError, ValueError):
    """Malformed files, flags or values violating a type invariant."""


class AtomError(InputError):
    """A sequence failed H^1(Z) atom validation."""


class NotMeanZero(AtomError):
    pass


class SupTooLarge(AtomError):
    pass


class NonContiguousSupport(AtomError):
    pass


class MissingTailModel(InputError):
    """A bounded-symbol operation needs a declared tail model."""


class UnknownSpectrum(InputError):
    """The spectrum of a grid symbol cannot be resolved on its extent."""


class WindowMismatch(InputError):
    """Operands live on different lattices or windows."""


class PrecondViolated(InputError):
    """An operation precondition does not hold for the given data."""
