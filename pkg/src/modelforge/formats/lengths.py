"""Custom segment length files: ``length, segment_name`` lines."""

from modelforge.diagnostics import DiagnosticLog
from modelforge.formats.common import format_number, iter_lines, parse_number


def parse_segment_lengths(
    text: str, source: str = "<segment lengths>", log: DiagnosticLog | None = None
) -> dict[str, float]:
    """Parse custom segment lengths keyed by segment name, in file order.

    Raises:
        ParseError: ``WrongFieldCount``, ``NonNumericValue``, ``NegativeLength``,
            ``EmptyName`` or ``DuplicateEntry``.
    """
    file_log = DiagnosticLog(source)
    lengths: dict[str, float] = {}
    for line in iter_lines(text):
        fields = line.trimmed()
        if len(fields) != 2:
            file_log.error(
                "WrongFieldCount",
                f"expected 'length, segment_name', got {len(fields)} fields",
                line=line.number,
            )
            continue
        raw, name = fields
        if not name:
            file_log.error("EmptyName", "segment name is empty", line=line.number)
            continue
        length = parse_number(raw, file_log, line.number, f"length of {name}")
        if length is None:
            continue
        if length <= 0:
            file_log.error(
                "NegativeLength",
                f"length of {name} must be strictly positive: {raw}",
                line=line.number,
                location=name,
            )
            continue
        if name in lengths:
            file_log.error(
                "DuplicateEntry", f"{name} given more than once", line=line.number
            )
            continue
        lengths[name] = length

    if log is not None:
        log.extend(file_log)
    file_log.raise_if_errors()
    return lengths


def serialize_segment_lengths(lengths: dict[str, float]) -> str:
    return "".join(f"{format_number(v)}, {k}\n" for k, v in lengths.items())
