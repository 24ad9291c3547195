"""Exception hierarchy for sumdiff."""

from typing import Optional


class SumDiffError(Exception):
    """Base class for every error raised by sumdiff."""


class ValidationError(SumDiffError):
    """An input violates a documented invariant."""

    def __init__(self, message: str, invariant: Optional[str] = None):
        super().__init__(message)
        self.invariant = invariant


class DomainError(SumDiffError):
    """A function was evaluated outside its domain."""


class DegenerateProjection(SumDiffError):
    """Every slope maps the configuration to a single value."""


class DegenerateDenominator(SumDiffError):
    """Every projected entropy (or log-count) vanishes, so the ratio is undefined."""


class NoBracket(SumDiffError):
    """The root-finding interval does not bracket a sign change."""


class NonFinite(SumDiffError):
    """A function returned a non-finite value inside the bracket."""


class NotOneDimensional(SumDiffError):
    """The reduced equalization system does not have exactly one free parameter."""


class TooSmallM(SumDiffError):
    """The common denominator is too small to give every supported point a positive count."""

    def __init__(self, message: str, M: int):
        super().__init__(message)
        self.M = M


class BudgetExceeded(SumDiffError):
    """The enumeration would visit more subsets than the configured cap."""

    def __init__(self, count: int, budget: int):
        super().__init__(f"{count} subsets exceed the enumeration budget of {budget}")
        self.count = count
        self.budget = budget
