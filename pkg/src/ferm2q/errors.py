"""Exception hierarchy shared by every stage of the compiler."""


class Ferm2QError(Exception):
    """Base class for all errors raised by ferm2q."""


class ValidationError(Ferm2QError, ValueError):
    """Input violates a documented precondition."""


class ParseError(ValidationError):
    """Malformed FCIDUMP text."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConflictError(ParseError):
    """Two FCIDUMP lines assign different values to the same canonical integral."""


class SymmetryViolationError(Ferm2QError):
    """An operator does not respect a symmetry that is being fixed."""


class ResourceLimitError(Ferm2QError):
    """A dense construction was requested for a system that is too large."""


class StageError(Ferm2QError):
    """Failure inside a pipeline stage; the stage name is kept for reporting."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
