"""Exception types raised across the package."""


class SymphaseError(Exception):
    """Base class for all package errors."""


class NonRealLeadingEntry(SymphaseError, ValueError):
    """The 4n-3 measurement layout needs a real first entry ``x[0]``.

    Use variant ``"B"`` for arbitrary complex signals.
    """


class NotAPerfectSquare(SymphaseError, ArithmeticError):
    """No polynomial square root reproduces the coefficients to tolerance.

    The best candidate found is kept on the exception so callers can fall
    back to it (this is the normal situation for noisy measurements).
    """

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class OddLeadingIndex(SymphaseError, ValueError):
    """The first nonzero coefficient sits at an odd index, so ``c`` is not a square."""


class MetadataError(SymphaseError, ValueError):
    """Vector length disagrees with its declared variant and origin dimension."""


class InputFormatError(SymphaseError, ValueError):
    """A signal, measurement or result file could not be parsed."""
