"""Exception types shared across the package."""


class CubkitError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(CubkitError, ValueError):
    """Input violates a precondition, or a verification step failed."""


class BudgetExceeded(CubkitError):
    """A computation would exceed a configured size or time guard."""
