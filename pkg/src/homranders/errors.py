"""Exception hierarchy shared by all modules."""


class HomRandersError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(HomRandersError, ValueError):
    """An array does not have the required shape."""


class DimensionError(HomRandersError, ValueError):
    """Inconsistent dimensions (for example dim m > dim g)."""


class IndexRangeError(HomRandersError, IndexError):
    """An index lies outside the range it is allowed to take."""


class PreconditionError(HomRandersError, ValueError):
    """An operation was called on data that violates its precondition."""


class ChartDomainError(HomRandersError, ValueError):
    """A chart point left the neighbourhood where the chart is valid."""


class FinslerDomainError(HomRandersError, ValueError):
    """A Finsler quantity was requested where it is undefined (e.g. y = 0)."""


class InternalConsistencyError(HomRandersError, RuntimeError):
    """Two independently computed quantities that must agree do not."""


class TheoremViolationError(InternalConsistencyError):
    """The Berwald and Ricci-quadratic verdicts disagree.

    The equivalence is a theorem, so this always signals a bug.
    """


class InputFormatError(HomRandersError, ValueError):
    """An input file could not be parsed into a valid datum."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class NumericalAccuracyWarning(UserWarning):
    """Finite-difference estimates at two step sizes disagree."""
