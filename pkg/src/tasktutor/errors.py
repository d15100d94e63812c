"""Exception types shared across the engine."""

from __future__ import annotations


class TaskTutorError(Exception):
    """Base class for all engine errors."""


class DuplicateName(TaskTutorError):
    """A schema with this name already exists in the knowledge base."""


class DanglingReference(TaskTutorError):
    """A step references an action that is not in the knowledge base."""


class ArityMismatch(TaskTutorError):
    """A step's argument count does not match the referenced schema."""

    def __init__(self, message: str, step_index: int | None = None) -> None:
        super().__init__(message)
        self.step_index = step_index


class UnboundVariable(TaskTutorError):
    """Expansion hit a variable with no binding."""


class MalformedDocument(TaskTutorError):
    """A serialized knowledge base or transcript could not be decoded."""


class UnknownObject(TaskTutorError):
    """An object reference does not exist in the loaded grid."""


class Unreachable(TaskTutorError):
    """No walkable path exists to the requested cell."""


class RefusedAfterRetries(TaskTutorError):
    """The language model kept refusing after the scold budget was spent."""


class MalformedResponse(TaskTutorError):
    """A backend response could not be parsed into the expected structure."""


class RecursionLimitExceeded(TaskTutorError):
    """The pending-definition stack hit the configured depth limit."""


class InvalidCorrection(TaskTutorError):
    """A user correction failed validation against the candidate lists."""


class WrongMode(TaskTutorError):
    """The session does not accept this input kind in its current mode."""


class UnknownSession(TaskTutorError):
    """No session with the given id exists."""


class BadConfig(TaskTutorError):
    """Session configuration is invalid (missing layout, bad backend, ...)."""


class ScriptError(TaskTutorError):
    """A teaching script failed to parse."""

    def __init__(self, message: str, line: int | None = None) -> None:
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
