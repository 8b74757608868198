"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ShiftError(Exception):
    """Base class for all errors raised by :mod:`wshift`."""


class SpecError(ShiftError, ValueError):
    """A weight specification is malformed or violates an invariant."""


class SpecParseError(SpecError):
    """Syntax error in a spec document or a tail expression.

    ``line`` and ``column`` are 1-based and refer to the document (or to the
    expression text when ``field`` names the tail it came from).
    """

    def __init__(self, message: str, line: int = 1, column: int = 1, field: str | None = None):
        self.line = line
        self.column = column
        self.field = field
        where = f"{field}: " if field else ""
        super().__init__(f"{where}line {line}, column {column}: {message}")


class NonPositiveWeightError(SpecError):
    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"weight at index {index} is not strictly positive and finite (got {value!r})")


class UnboundedWeightError(SpecError):
    def __init__(self, index: int, value: float, cap: float):
        self.index = index
        self.value = value
        self.cap = cap
        super().__init__(
            f"weight sequence looks unbounded: weight {value:.6g} at index {index} exceeds cap {cap:.3g}"
        )


class ExpressionEvalError(SpecError):
    """Tail expression overflowed, hit a domain error or produced NaN."""


class BudgetError(ShiftError):
    """A requested window, order or dimension exceeds the configured budget."""


class MomentOverflowError(BudgetError):
    """Moments beyond double range at the requested order."""


class InconsistentRadiiError(ShiftError, ValueError):
    """Radii violate the ordering chains and cannot describe a shift."""


class OutsideDiscError(ShiftError, ValueError):
    """A point lies outside the open disc where the requested object exists."""


class RegistryError(ShiftError):
    """Theorem registry and public operation list disagree."""
