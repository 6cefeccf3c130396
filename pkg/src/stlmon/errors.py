"""Exception types shared across the library."""


class StlmonError(Exception):
    """Base class for every error raised by this library."""


class SpecSyntaxError(StlmonError):
    """Specification text could not be parsed.

    Carries the 1-based line and column of the offending token so callers
    can point at the exact spot in the source file.
    """

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UndeclaredVariable(StlmonError):
    """A predicate refers to a variable with no `var` declaration."""


class NnfUnsupported(StlmonError):
    """Negation cannot be pushed past this node (negated until, negated true)."""


class NonNnfInput(NnfUnsupported):
    """An evaluator received a formula that still contains Not or Implies nodes."""


class MissingBounds(StlmonError):
    """A predicate needs finite value bounds but none are available."""


class DivisionByIntervalContainingZero(StlmonError):
    """Interval arithmetic hit a divisor interval that straddles zero."""


class GridMismatch(StlmonError):
    """A time instant does not land on the sampling grid."""


class TraceError(StlmonError):
    """Base class for trace loading and validation errors."""


class EmptyTrace(TraceError):
    """The trace file contains a header but no data rows."""


class InconsistentTimeGrid(TraceError):
    """An explicit time column deviates from 0, dt, 2*dt, ..."""


class TraceFormatError(TraceError):
    """Ragged rows, non-numeric cells, or a malformed header."""


class EmptyInput(StlmonError):
    """A smooth aggregate was asked to reduce an empty collection."""


class WindowTooShort(StlmonError):
    """A sample window is shorter than the formula's minimum span."""
