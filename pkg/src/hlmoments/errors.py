"""Exception types raised by the package."""


class HLError(Exception):
    """Base class for all package errors."""


class BoundsError(HLError, ValueError):
    """An input lies outside a precomputed table or a supported size range."""


class DomainError(HLError, ValueError):
    """A mathematical precondition is violated (non-prime, gcd conditions, ...)."""


class NumericError(HLError, ArithmeticError):
    """A numerical routine failed to reach its requested tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
