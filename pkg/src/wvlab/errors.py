"""Exception types shared across the package.

The CLI maps these onto exit codes: validation problems exit 2, violated
numeric invariants exit 3, numeric-domain and truncation failures exit 4.
"""


class WvlabError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(WvlabError):
    """Invalid parameters, malformed input, or a violated precondition."""


class DegenerateSeriesError(ValidationError):
    """A series with no nonzero coefficient was given where mass is required."""


class DomainError(WvlabError):
    """A numeric expression was queried outside its domain.

    Domain failures are hard errors, never silent clamps.  ``subexpression``
    names the innermost offending expression when known.
    """

    def __init__(self, message: str, subexpression: str | None = None):
        if subexpression:
            message = f"{message} [in {subexpression}]"
        super().__init__(message)
        self.subexpression = subexpression


class DivergenceError(DomainError):
    """An integral required to converge did not."""


class TruncationError(WvlabError):
    """The horizon scan hit its cap without certifying the series tail."""

    def __init__(self, message: str, horizon: int | None = None):
        super().__init__(message)
        self.horizon = horizon


class InvariantViolation(WvlabError):
    """A quantity the theory guarantees failed its numeric check."""
