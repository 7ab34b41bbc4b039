from typing import Any, Optional


class Error(Exception):
    """Base class for exceptions in this module."""


class InputError(Error):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class StructuralError(InputError):
    """Data that does not describe a valid object (indices, shapes, axioms of the container)."""


class SchemaError(InputError):
    def __init__(self, message: str, path: str = "/"):
        super().__init__(message)
        self.path = path


class DomainError(Error):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ModeError(Error):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ResourceError(Error):
    """A search bound or dimension cap was hit; ``partial`` holds what was computed."""

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.message = message
        self.partial = partial
        self.truncated = True
