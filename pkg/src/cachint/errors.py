"""Exception types shared across the package."""


class CachintError(Exception):
    """Base class for all package-specific errors."""


class DomainError(CachintError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested exactly at a pole (e.g. zeta at 1)."""


class InstabilityError(CachintError, ValueError):
    """Queue utilization is at or above 1; the queue has no steady state."""


class InfeasibleError(CachintError, RuntimeError):
    """The delay constraint cannot be met with the given parameters."""


class UnsupportedRegimeError(CachintError, ValueError):
    """Parameters fall in a regime the analytic machinery does not cover."""


class NumericalError(CachintError, ArithmeticError):
    """A numeric routine produced a non-finite or out-of-range intermediate."""


class ScenarioError(CachintError, ValueError):
    """A scenario file failed to parse or validate; message lists all issues."""
