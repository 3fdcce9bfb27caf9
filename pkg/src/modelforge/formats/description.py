"""Model description files.

Each line describes one segment::

    segment_name, segment_type, joint, parent_name[, point_set[, constraint_set]]

The root segment's parent is ``ROOT``. Parents must be listed before their
children.
"""

from collections.abc import Iterator
from dataclasses import dataclass, field

from modelforge.diagnostics import DiagnosticLog
from modelforge.formats.common import iter_lines

ROOT = "ROOT"
_REQUIRED = ("segment name", "segment type", "joint", "parent name")


@dataclass(frozen=True)
class DescriptionLine:
    segment_name: str
    segment_type: str
    joint_code: str
    parent_name: str
    point_set: str | None = None
    constraint_set: str | None = None
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ModelDescription:
    lines: tuple[DescriptionLine, ...]
    source: str | None = field(default=None, compare=False)

    def __iter__(self) -> Iterator[DescriptionLine]:
        return iter(self.lines)

    def __len__(self) -> int:
        return len(self.lines)

    def segment_types(self) -> list[str]:
        """Distinct segment types in file order."""
        return list(dict.fromkeys(line.segment_type for line in self.lines))

    def type_of(self, segment_name: str) -> str | None:
        return next(
            (d.segment_type for d in self.lines if d.segment_name == segment_name), None
        )


def parse_description(
    text: str, source: str = "<description>", log: DiagnosticLog | None = None
) -> ModelDescription:
    """Parse a model description.

    Raises:
        ParseError: ``WrongFieldCount`` or ``EmptyName``, one diagnostic per
            offending line.
    """
    file_log = DiagnosticLog(source)
    lines = []
    for line in iter_lines(text):
        fields = line.trimmed()
        if not 4 <= len(fields) <= 6:
            file_log.error(
                "WrongFieldCount",
                f"expected 4 to 6 fields, got {len(fields)}",
                line=line.number,
            )
            continue
        empty = [what for what, value in zip(_REQUIRED, fields, strict=False) if not value]
        if empty:
            file_log.error(
                "EmptyName", f"{empty[0]} is empty", line=line.number
            )
            continue
        optional = [f or None for f in fields[4:]] + [None, None]
        lines.append(
            DescriptionLine(
                segment_name=fields[0],
                segment_type=fields[1],
                joint_code=fields[2],
                parent_name=fields[3],
                point_set=optional[0],
                constraint_set=optional[1],
                line=line.number,
            )
        )

    if log is not None:
        log.extend(file_log)
    file_log.raise_if_errors()
    return ModelDescription(tuple(lines), source)


def serialize_description(description: ModelDescription) -> str:
    out = []
    for d in description.lines:
        fields = [d.segment_name, d.segment_type, d.joint_code, d.parent_name]
        if d.point_set or d.constraint_set:
            fields.append(d.point_set or "")
        if d.constraint_set:
            fields.append(d.constraint_set)
        out.append(", ".join(fields))
    return "\n".join(out) + "\n"
