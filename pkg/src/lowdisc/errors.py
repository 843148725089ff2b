"""Exception types shared across the package."""


class LowdiscError(Exception):
    """Base class for all package errors."""


class ValidationError(LowdiscError):
    """Invalid argument, malformed spec, or violated precondition."""


class BudgetError(LowdiscError):
    """A configured work, memory, or size budget would be exceeded."""


class PrecisionError(BudgetError):
    """Fixed-point width too small for the requested index range."""


class TruncationError(BudgetError):
    """Laurent series window too shallow for the requested precision."""
