"""Scaling table CSV files.

Two header variants are accepted::

    segment_type,gender,length_fraction,mass_fraction,com_fraction,rgyr_x,rgyr_y,rgyr_z[,direction]
    segment_type,a,b,com_fraction,rgyr_x,rgyr_y,rgyr_z[,direction]
"""

from modelforge.diagnostics import DiagnosticLog, ParseError
from modelforge.formats.common import format_number, iter_lines, parse_number
from modelforge.scaling import Direction, Gender, ScalingRow, ScalingTable

REGRESSION_HEADER = (
    "segment_type",
    "gender",
    "length_fraction",
    "mass_fraction",
    "com_fraction",
    "rgyr_x",
    "rgyr_y",
    "rgyr_z",
)
LINEAR_AGE_HEADER = ("segment_type", "a", "b", "com_fraction", "rgyr_x", "rgyr_y", "rgyr_z")
# Columns that may hold negative values
_SIGNED = {"b"}


def parse_scaling_table(
    text: str,
    algorithm_id: str = "custom",
    source: str = "<scaling table>",
    log: DiagnosticLog | None = None,
) -> ScalingTable:
    """Parse a scaling table.

    Raises:
        ParseError: on a malformed header or any invalid row.
    """
    file_log = DiagnosticLog(source)
    lines = iter(iter_lines(text))
    header_line = next(lines, None)
    if header_line is None:
        raise ParseError("MalformedHeader", "scaling table is empty", file=source)

    header = tuple(f.lower() for f in header_line.trimmed())
    has_direction = header[-1:] == ("direction",)
    columns = header[:-1] if has_direction else header
    if columns == REGRESSION_HEADER:
        linear_age = False
    elif columns == LINEAR_AGE_HEADER:
        linear_age = True
    else:
        raise ParseError(
            "MalformedHeader",
            f"unrecognised scaling table header: {', '.join(header)}",
            file=source,
            line=header_line.number,
        )

    rows: list[ScalingRow] = []
    seen: set[tuple[str, Gender | None]] = set()
    for line in lines:
        fields = line.fields
        if len(fields) != len(header):
            file_log.error(
                "WrongFieldCount",
                f"expected {len(header)} fields, got {len(fields)}",
                line=line.number,
            )
            continue
        values = dict(zip(header, fields, strict=True))
        segment_type = values["segment_type"]
        if not segment_type:
            file_log.error("EmptyName", "segment type is empty", line=line.number)
            continue

        gender: Gender | None = None
        if not linear_age:
            try:
                gender = Gender(values["gender"].lower())
            except ValueError:
                file_log.error(
                    "InvalidGender",
                    f"gender must be male or female, got {values['gender']!r}",
                    line=line.number,
                )
                continue

        direction = Direction.DOWN
        if has_direction:
            try:
                direction = Direction(values["direction"].lower())
            except ValueError:
                file_log.error(
                    "UnknownDirection",
                    f"direction must be down, up or forward, got {values['direction']!r}",
                    line=line.number,
                )
                continue

        numbers: dict[str, float] = {}
        for name in columns:
            if name in ("segment_type", "gender"):
                continue
            number = parse_number(values[name], file_log, line.number, name)
            if number is None:
                break
            if number < 0 and name not in _SIGNED:
                file_log.error(
                    "NegativeValue",
                    f"{name} must not be negative, got {values[name]}",
                    line=line.number,
                )
                break
            numbers[name] = number
        else:
            key = (segment_type, gender)
            if key in seen:
                file_log.error(
                    "DuplicateEntry",
                    f"segment type {segment_type!r} listed twice",
                    line=line.number,
                )
                continue
            seen.add(key)
            rows.append(
                ScalingRow(
                    segment_type=segment_type,
                    com_fraction=numbers["com_fraction"],
                    rgyr=(numbers["rgyr_x"], numbers["rgyr_y"], numbers["rgyr_z"]),
                    gender=gender,
                    length_fraction=numbers.get("length_fraction"),
                    mass_fraction=numbers.get("mass_fraction"),
                    a=numbers.get("a"),
                    b=numbers.get("b"),
                    direction=direction,
                )
            )

    if log is not None:
        log.extend(file_log)
    file_log.raise_if_errors()
    return ScalingTable(algorithm_id=algorithm_id, rows=tuple(rows), linear_age=linear_age)


def serialize_scaling_table(table: ScalingTable) -> str:
    """Write a table back out; the direction column only when a row needs it."""
    header = LINEAR_AGE_HEADER if table.linear_age else REGRESSION_HEADER
    with_direction = any(row.direction != Direction.DOWN for row in table.rows)
    if with_direction:
        header = (*header, "direction")
    lines = [",".join(header)]
    for row in table.rows:
        if table.linear_age:
            values = [row.segment_type, _num(row.a), _num(row.b)]
        else:
            gender = row.gender.value if row.gender else ""
            values = [
                row.segment_type,
                gender,
                _num(row.length_fraction),
                _num(row.mass_fraction),
            ]
        values += [format_number(row.com_fraction), *(format_number(r) for r in row.rgyr)]
        if with_direction:
            values.append(row.direction.value)
        lines.append(",".join(values))
    return "\n".join(lines) + "\n"


def _num(value: float | None) -> str:
    return format_number(value if value is not None else 0.0)
