"""Exception types shared across the package."""


class ShiqError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ShiqError):
    """Malformed s-expression input."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class ValidationError(ShiqError):
    """Well-formed input that violates a knowledge-base constraint."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class SignatureError(ShiqError):
    """A role or atom was used that the enclosing structure does not know."""


class EngineLimitError(ShiqError):
    """A search budget or structural bound was exceeded.

    This is an internal failure, never a verdict; callers must not map it
    to consistent or inconsistent.
    """


class ExtractionError(ShiqError):
    """Model extraction was asked for a forest it does not support."""
