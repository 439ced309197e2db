"""Exceptions raised by the zeta engine.

Every failure the pipeline can report derives from ``ZetaError`` so callers
(the CLI in particular) can catch one type and still show a precise message.
"""
from __future__ import annotations

from typing import Any, Optional


class ZetaError(Exception):
    pass


class NonUnit(ZetaError):
    pass


class DimensionTooLow(ZetaError):
    pass


class GenusZero(ZetaError):
    pass


class NonUnitVertex(ZetaError):
    pass


class Degenerate(ZetaError):
    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class ExceedsSearchBound(ZetaError):
    pass


class NoUnitPivot(ZetaError):
    def __init__(self, message: str, row: Any = None):
        super().__init__(message)
        self.row = row


class NonUnitDerivative(ZetaError):
    pass


class Inconsistent(ZetaError):
    pass


class DimensionMismatch(ZetaError):
    pass


class PrecisionExhausted(ZetaError):
    pass


class WeilViolation(ZetaError):
    pass


class TooLarge(ZetaError):
    pass


class ParseError(ZetaError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateTerm(ParseError):
    pass


class StageError(ZetaError):
    """A failure tagged with the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
