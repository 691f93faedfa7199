"""Exception types shared across the package."""


class CFSearchError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(CFSearchError, ValueError):
    """An argument violates a documented precondition (bad shape, non-finite
    value, empty search space, degenerate step size, ...)."""


class NumericError(CFSearchError, ArithmeticError):
    """A numerical guarantee was violated at runtime (failed factorization,
    excessive residual, non-real cost, ...)."""
