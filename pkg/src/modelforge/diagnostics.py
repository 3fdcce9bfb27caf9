"""Located diagnostics and the exception hierarchy shared by all modules."""

import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import StrEnum

logger = logging.getLogger(__name__)


class Severity(StrEnum):
    """Severity of a diagnostic."""

    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """A single finding with enough location detail to act on it."""

    severity: Severity
    code: str
    message: str
    file: str | None = None
    line: int | None = None
    location: str | None = None

    @property
    def is_error(self) -> bool:
        return self.severity == Severity.ERROR

    def to_dict(self) -> dict[str, str | int | None]:
        """Machine-readable form used by the CLI."""
        return {
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
            "file": self.file,
            "line": self.line,
            "location": self.location,
        }

    def __str__(self) -> str:
        where = self.file or "<input>"
        if self.line is not None:
            where = f"{where}:{self.line}"
        if self.location:
            where = f"{where} ({self.location})"
        return f"{where}: {self.severity.value} [{self.code}] {self.message}"


class ModelForgeError(Exception):
    """Base error; carries a code and the diagnostics that caused it."""

    def __init__(
        self,
        code: str,
        message: str,
        *,
        file: str | None = None,
        line: int | None = None,
        location: str | None = None,
        diagnostics: list[Diagnostic] | None = None,
    ):
        super().__init__(message)
        self.code = code
        self.message = message
        if diagnostics is None:
            diagnostics = [
                Diagnostic(Severity.ERROR, code, message, file, line, location)
            ]
        self.diagnostics = diagnostics

    def __str__(self) -> str:
        if len(self.diagnostics) == 1:
            return str(self.diagnostics[0])
        return "\n".join(str(d) for d in self.diagnostics)


class ParseError(ModelForgeError):
    """An input file could not be parsed."""


class DictionaryError(ModelForgeError):
    """A dictionary lookup or descriptor is invalid."""


class ScalingError(ModelForgeError):
    """Segment scaling could not be computed."""


class BuildError(ModelForgeError):
    """The kinematic tree could not be built."""


class MeshError(ModelForgeError):
    """A mesh is malformed or unsuitable for volume integration."""


class ExportError(ModelForgeError):
    """A model could not be exported."""


class DiagnosticLog:
    """Ordered collector of diagnostics for one run or one file."""

    def __init__(self, file: str | None = None):
        self.file = file
        self._items: list[Diagnostic] = []

    def __iter__(self) -> Iterator[Diagnostic]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def add(self, diagnostic: Diagnostic) -> None:
        self._items.append(diagnostic)
        if diagnostic.severity == Severity.WARNING:
            logger.warning("%s", diagnostic)

    def error(
        self,
        code: str,
        message: str,
        *,
        line: int | None = None,
        location: str | None = None,
        file: str | None = None,
    ) -> None:
        self.add(
            Diagnostic(Severity.ERROR, code, message, file or self.file, line, location)
        )

    def warning(
        self,
        code: str,
        message: str,
        *,
        line: int | None = None,
        location: str | None = None,
        file: str | None = None,
    ) -> None:
        self.add(
            Diagnostic(
                Severity.WARNING, code, message, file or self.file, line, location
            )
        )

    def extend(self, diagnostics: Iterable[Diagnostic]) -> None:
        """Append diagnostics already reported elsewhere, skipping exact repeats."""
        for diagnostic in diagnostics:
            if diagnostic not in self._items:
                self._items.append(diagnostic)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self._items if d.is_error]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self._items if not d.is_error]

    @property
    def has_errors(self) -> bool:
        return any(d.is_error for d in self._items)

    def codes(self) -> list[str]:
        return [d.code for d in self._items]

    def raise_if_errors(self, error_type: type[ModelForgeError] = ParseError) -> None:
        """Raise one exception carrying every error collected so far."""
        errors = self.errors
        if errors:
            first = errors[0]
            raise error_type(first.code, first.message, diagnostics=errors)
