"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RegimeError(DomainError):
    """Parameters violate the sub/critical/super regime required by a formula."""


class GridMismatchError(ValueError):
    """Fields that must share one grid do not."""


class ResourceError(RuntimeError):
    """An operation would exceed its stated cost budget."""


class UndefinedQuotientError(ArithmeticError):
    """A quotient functional was evaluated with an identically zero denominator."""
