"""Exception types raised by the shiftsum library.

Everything derives from ShiftsumError so callers can catch library
failures without swallowing genuine bugs.  The CLI maps these onto
exit codes: ResourceLimitError is an exit-2 condition, every other
subclass is an exit-1 precondition failure.
"""


class ShiftsumError(Exception):
    """Base class for all shiftsum errors."""


class ResourceLimitError(ShiftsumError):
    """A request exceeds a configured size or runtime budget."""


class DomainError(ShiftsumError):
    """A parameter is outside its mathematical domain."""


class RangeError(ShiftsumError):
    """A coefficient table is too short for the requested window."""


class UnsupportedWeightError(DomainError):
    """Only weight-12 level-1 normalization is implemented."""


class CoefficientParseError(ShiftsumError):
    """A coefficient file is malformed."""


class ConfigParseError(ShiftsumError):
    """A key=value config file is malformed."""


class NonContiguousIndexError(CoefficientParseError):
    """Coefficient file indices must run 1..N without gaps."""


class InsufficientInputError(RangeError):
    """An input table does not extend far enough for a derived table."""


class GridTooSmallError(DomainError):
    """An evaluation grid is too coarse for the requested transform."""


class WindowViolationError(DomainError):
    """A shift-window exponent lies outside the admissible range."""


class DegenerateInputError(DomainError):
    """Too few or degenerate data points for a fit."""
