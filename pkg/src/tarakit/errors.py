"""Shared error types and the violation record used by validators."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """A single validation finding. ``where`` names the offending id or field."""

    where: str
    message: str

    def __str__(self) -> str:
        return f"{self.where}: {self.message}"


class ModelError(ValueError):
    """Base class for model ingestion errors."""


class ModelFormatError(ModelError):
    """The document is not syntactically or structurally well formed.

    Carries ``line``/``column`` when the underlying JSON parser reported them.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class DuplicateIdError(ModelError):
    """Two entities of the same kind share an id."""


class DanglingReferenceError(ModelError):
    """A reference names an id that does not exist."""
