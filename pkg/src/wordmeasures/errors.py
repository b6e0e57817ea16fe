"""Exception types shared across the package.

The CLI maps these onto exit codes: parse errors exit with 2, budget
overruns with 3 and internal invariant violations with 4.
"""


class WordMeasuresError(Exception):
    """Base class for errors raised by this package."""


class ParseError(WordMeasuresError, ValueError):
    """Malformed word or class-function expression."""

    def __init__(self, message: str, text: str = "", column: int | None = None):
        self.text = text
        self.column = column
        where = f" (column {column + 1})" if column is not None else ""
        super().__init__(f"{message}{where}")


class BudgetExceeded(WordMeasuresError):
    """A configured resource bound would be exceeded."""

    def __init__(self, budget: str, limit, requested=None):
        self.budget = budget
        self.limit = limit
        self.requested = requested
        extra = f", requested {requested}" if requested is not None else ""
        super().__init__(f"budget '{budget}' exceeded (limit {limit}{extra})")


class InvariantViolation(WordMeasuresError, AssertionError):
    """An internal consistency check failed."""


class ThresholdWarning(UserWarning):
    """A pole-based validity threshold was too optimistic and has been raised."""
