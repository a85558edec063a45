"""Exception hierarchy shared by every module."""

from __future__ import annotations


class EntglError(Exception):
    """Base class for all package errors."""


class InvariantViolation(EntglError, ValueError):
    """A numeric object failed one of its structural invariants."""


class NotHermitian(InvariantViolation):
    pass


class DimensionMismatch(EntglError, ValueError):
    pass


class InvalidSubsystem(EntglError, IndexError):
    pass


class NotBipartite(EntglError, ValueError):
    pass


class NotSquare(DimensionMismatch):
    pass


class WrongDimension(DimensionMismatch):
    pass


class ParamOutOfRange(EntglError, ValueError):
    pass


class InvalidOrder(ParamOutOfRange):
    pass


class NotUnitVector(ParamOutOfRange):
    pass


class NotOrthonormal(EntglError, ValueError):
    pass


class NotDetected(EntglError):
    """The criterion value does not exceed one, so no witness exists."""


class PartyCountTooLarge(EntglError, ValueError):
    pass


class SizeCapExceeded(EntglError, ValueError):
    pass


class StateIsPPT(EntglError, ValueError):
    pass


class ParseError(EntglError, ValueError):
    """Malformed input file; carries an optional line/column location."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}, column {column})"
        super().__init__(message + loc)
        self.line = line
        self.column = column
