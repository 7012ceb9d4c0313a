"""Exception types shared by the parsers and engines."""

from __future__ import annotations


class RevkitError(Exception):
    """Base class for all revkit errors."""


class ValidationError(RevkitError, ValueError):
    """A value violates a documented invariant."""


class ParseError(RevkitError, ValueError):
    """Malformed text input. Carries a 1-based line and column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, source: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
            if column is not None:
                where += f"{column}:"
        super().__init__(f"{where} {message}" if where else message)
