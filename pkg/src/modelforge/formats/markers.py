"""Custom marker files.

Every entry spans two lines::

    segment_name, type, distance
    name1, name2, name3, name4, name5, name6, tx, ty, tz, rx, ry, rz

``type`` is ``Marker``, ``Cluster`` or ``DoubleCluster``, consuming 1, 3 or 6
name slots (unused slots are left empty). ``distance`` is the marker spacing
of a cluster in metres. Translations are fractions of the segment length,
rotations intrinsic X-Y-Z Euler angles in degrees.
"""

from dataclasses import dataclass, field
from enum import StrEnum

from modelforge.diagnostics import DiagnosticLog
from modelforge.formats.common import SourceLine, format_number, iter_lines, parse_numbers
from modelforge.spatial import Vec3, as_vec3

NAME_SLOTS = 6


class MarkerType(StrEnum):
    MARKER = "Marker"
    CLUSTER = "Cluster"
    DOUBLE_CLUSTER = "DoubleCluster"

    @property
    def name_count(self) -> int:
        return {"Marker": 1, "Cluster": 3, "DoubleCluster": 6}[self.value]


@dataclass(frozen=True)
class MarkerRow:
    segment: str
    marker_type: MarkerType
    distance: float
    names: tuple[str, ...]
    translation: Vec3 = (0.0, 0.0, 0.0)
    rotation: Vec3 = (0.0, 0.0, 0.0)
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class MarkerSpec:
    rows: tuple[MarkerRow, ...]
    source: str | None = field(default=None, compare=False)


def _marker_type(value: str) -> MarkerType | None:
    lowered = value.lower()
    return next((t for t in MarkerType if t.value.lower() == lowered), None)


def parse_marker_file(
    text: str, source: str = "<markers>", log: DiagnosticLog | None = None
) -> MarkerSpec:
    """Parse a marker file.

    Raises:
        ParseError: ``WrongFieldCount``, ``UnknownMarkerType``,
            ``NonNumericValue``, ``NegativeLength``, ``EmptyName`` or
            ``NameCountMismatch``.
    """
    file_log = DiagnosticLog(source)
    rows = []
    header: SourceLine | None = None

    for line in iter_lines(text):
        if header is None:
            header = line
            continue
        row = _parse_entry(header, line, file_log)
        if row is not None:
            rows.append(row)
        header = None

    if header is not None:
        file_log.error(
            "WrongFieldCount",
            "marker entry has no data line",
            line=header.number,
        )

    if log is not None:
        log.extend(file_log)
    file_log.raise_if_errors()
    return MarkerSpec(tuple(rows), source)


def _parse_entry(
    header: SourceLine, data: SourceLine, log: DiagnosticLog
) -> MarkerRow | None:
    head = header.trimmed()
    if len(head) != 3:
        log.error(
            "WrongFieldCount",
            f"expected 'segment, type, distance', got {len(head)} fields",
            line=header.number,
        )
        return None
    segment, type_name, raw_distance = head
    if not segment:
        log.error("EmptyName", "segment name is empty", line=header.number)
        return None
    marker_type = _marker_type(type_name)
    if marker_type is None:
        log.error(
            "UnknownMarkerType",
            f"marker type must be Marker, Cluster or DoubleCluster, got {type_name!r}",
            line=header.number,
        )
        return None
    distance = parse_numbers([raw_distance], log, header.number, "marker distance")
    if distance is None:
        return None
    if distance[0] < 0:
        log.error(
            "NegativeLength",
            f"marker distance must not be negative: {raw_distance}",
            line=header.number,
        )
        return None

    if len(data.fields) != NAME_SLOTS + 6:
        log.error(
            "WrongFieldCount",
            f"expected {NAME_SLOTS} name slots and 6 numbers, got {len(data.fields)} fields",
            line=data.number,
        )
        return None
    names = tuple(n for n in data.fields[:NAME_SLOTS] if n)
    if len(names) != marker_type.name_count:
        log.error(
            "NameCountMismatch",
            f"{marker_type.value} needs {marker_type.name_count} marker names, "
            f"got {len(names)}",
            line=data.number,
            location=segment,
        )
        return None
    numbers = parse_numbers(data.fields[NAME_SLOTS:], log, data.number, "marker offset")
    if numbers is None:
        return None

    return MarkerRow(
        segment=segment,
        marker_type=marker_type,
        distance=distance[0],
        names=names,
        translation=as_vec3(numbers[:3]),
        rotation=as_vec3(numbers[3:]),
        line=header.number,
    )


def serialize_marker_file(spec: MarkerSpec) -> str:
    lines = []
    for row in spec.rows:
        lines.append(
            f"{row.segment}, {row.marker_type.value}, {format_number(row.distance)}"
        )
        slots = list(row.names) + [""] * (NAME_SLOTS - len(row.names))
        numbers = [format_number(v) for v in (*row.translation, *row.rotation)]
        lines.append(", ".join(slots + numbers))
    return "\n".join(lines) + "\n"
