"""Shared exception types."""

from __future__ import annotations


class BlockspeakError(Exception):
    """Base class for all errors raised by this package."""


class SourceError(BlockspeakError):
    """An error tied to a position in agent source text."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.line = line
        self.col = col

    def __str__(self) -> str:
        base = super().__str__()
        if self.line:
            return f"{self.line}:{self.col}: {base}"
        return base


class AslSyntaxError(SourceError):
    """Malformed agent source. Carries the token set the parser expected."""

    def __init__(self, message: str, line: int, col: int, expected: set[str] | None = None):
        super().__init__(message, line, col)
        self.expected = frozenset(expected or ())


class AslSemanticError(SourceError):
    """Well-formed source violating a program invariant (e.g. non-ground initial belief)."""


class QueryError(BlockspeakError):
    """Failure while evaluating a logic expression against a belief base."""


class FlounderError(QueryError):
    """Negation applied to a non-ground subgoal."""


class DepthLimitError(QueryError):
    """Rule resolution exceeded the recursion depth cap."""


class ArithEvalError(QueryError):
    """Arithmetic evaluation failure: unbound variable, bad type, division by zero."""
