"""Subject anthropometry files: ``keyword, value`` lines."""

from dataclasses import fields

from modelforge.diagnostics import DiagnosticLog
from modelforge.formats.common import format_number, iter_lines, parse_number
from modelforge.scaling import ANTHROPOMETRY_KEYWORDS, AnthropometryProfile, Gender

_BY_LOWER = {k.lower(): v for k, v in ANTHROPOMETRY_KEYWORDS.items()}
_KEYWORD_FOR = {v: k for k, v in ANTHROPOMETRY_KEYWORDS.items()}


def parse_anthropometry(
    text: str, source: str = "<anthropometry>", log: DiagnosticLog | None = None
) -> AnthropometryProfile:
    """Parse an anthropometry file. Keywords are case-insensitive.

    Raises:
        ParseError: ``UnknownKeyword``, ``NonNumericValue``, ``NegativeLength``,
            ``InvalidGender``, ``DuplicateEntry`` or ``WrongFieldCount``.
    """
    file_log = DiagnosticLog(source)
    values: dict[str, object] = {}

    for line in iter_lines(text):
        fields_ = line.trimmed()
        if len(fields_) != 2:
            file_log.error(
                "WrongFieldCount",
                f"expected 'keyword, value', got {len(fields_)} fields",
                line=line.number,
            )
            continue
        keyword, raw = fields_
        attribute = _BY_LOWER.get(keyword.lower())
        if attribute is None:
            file_log.error(
                "UnknownKeyword",
                f"unknown anthropometry keyword {keyword!r}",
                line=line.number,
            )
            continue
        if attribute in values:
            file_log.error(
                "DuplicateEntry", f"{keyword} given more than once", line=line.number
            )
            continue

        if attribute == "gender":
            try:
                values[attribute] = Gender(raw.lower())
            except ValueError:
                file_log.error(
                    "InvalidGender",
                    f"gender must be male or female, got {raw!r}",
                    line=line.number,
                )
            continue

        number = parse_number(raw, file_log, line.number, keyword)
        if number is None:
            continue
        if attribute == "age":
            if number < 0:
                file_log.error(
                    "NegativeLength", f"age must not be negative: {raw}", line=line.number
                )
                continue
        elif number <= 0:
            file_log.error(
                "NegativeLength",
                f"{keyword} must be strictly positive: {raw}",
                line=line.number,
            )
            continue
        values[attribute] = number

    if log is not None:
        log.extend(file_log)
    file_log.raise_if_errors()
    return AnthropometryProfile(**values)  # type: ignore[arg-type]


def serialize_anthropometry(profile: AnthropometryProfile) -> str:
    lines = []
    for f in fields(profile):
        value = getattr(profile, f.name)
        if value is None:
            continue
        text = value.value if isinstance(value, Gender) else format_number(value)
        lines.append(f"{_KEYWORD_FOR[f.name]}, {text}")
    return "\n".join(lines) + "\n"
