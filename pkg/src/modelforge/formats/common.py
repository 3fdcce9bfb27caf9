"""Line tokenizer and strict number parsing shared by every file format."""

import math
import re
from collections.abc import Iterator
from dataclasses import dataclass

from modelforge.diagnostics import DiagnosticLog

_DECIMAL = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?$")
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


@dataclass(frozen=True)
class SourceLine:
    """A non-empty, comment-stripped physical line split into fields."""

    number: int
    fields: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.fields)

    def trimmed(self) -> tuple[str, ...]:
        """Fields with trailing empty padding removed."""
        fields = list(self.fields)
        while fields and not fields[-1]:
            fields.pop()
        return tuple(fields)


def iter_lines(text: str, comment_chars: str = "%") -> Iterator[SourceLine]:
    """Yield data lines; line numbers index the physical lines of ``text``.

    Accepts LF and CRLF endings and a leading byte-order mark.
    """
    if text.startswith("\ufeff"):
        text = text[1:]
    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        for char in comment_chars:
            cut = line.find(char)
            if cut >= 0:
                line = line[:cut]
        if not line.strip():
            continue
        yield SourceLine(number, tuple(f.strip() for f in line.split(",")))


def parse_number(
    value: str, log: DiagnosticLog, line: int, what: str
) -> float | None:
    """Parse a strict, finite decimal literal; record ``NonNumericValue`` on failure."""
    if _DECIMAL.match(value):
        number = float(value)
        if math.isfinite(number):
            return number
        log.error(
            "NonNumericValue", f"{what}: {value!r} is out of range", line=line
        )
        return None
    log.error("NonNumericValue", f"{what}: expected a number, got {value!r}", line=line)
    return None


def parse_numbers(
    values: tuple[str, ...] | list[str], log: DiagnosticLog, line: int, what: str
) -> list[float] | None:
    numbers = [parse_number(v, log, line, what) for v in values]
    if any(n is None for n in numbers):
        return None
    return [n for n in numbers if n is not None]


def parse_flag(value: str, log: DiagnosticLog, line: int, what: str) -> bool | None:
    lowered = value.lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    log.error("InvalidFlag", f"{what}: expected true or false, got {value!r}", line=line)
    return None


def format_number(value: float) -> str:
    """Shortest decimal text that round-trips to the same float."""
    return repr(float(value))


def join_fields(*fields: object) -> str:
    return ", ".join(
        format_number(f) if isinstance(f, float) else str(f) for f in fields
    )
