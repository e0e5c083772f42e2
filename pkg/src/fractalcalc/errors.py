class FractalCalcError(Exception):
    """Base class for all errors raised by :mod:`fractalcalc`."""


class DomainError(FractalCalcError, ValueError):
    """Raised when inputs fall outside an operation's domain."""


class NumericalFailure(FractalCalcError, ArithmeticError):
    """Raised when a numerical procedure cannot produce a result."""
