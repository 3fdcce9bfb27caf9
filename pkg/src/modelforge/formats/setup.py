"""Declarative object setup files.

One property per line, keyed by segment type::

    segment_type, length, 0.3
    segment_type, scale_to, Segment_Thigh
    segment_type, joint_offset, x, y, z
    segment_type, rotation, rx, ry, rz
    segment_type, mesh, cuboid, x, y, z
    segment_type, mesh, cylinder, radius, height
    segment_type, mesh, sphere, radius
    segment_type, mesh, file.obj, dx, dy, dz
    segment_type, mesh_center, x, y, z
    segment_type, mass, m
    segment_type, com, x, y, z
    segment_type, inertia, i11, i12, i13, i21, i22, i23, i31, i32, i33

Mesh dimensions may be the token ``length`` to use the segment length.
"""

from dataclasses import dataclass, field, fields

from modelforge.diagnostics import DiagnosticLog
from modelforge.formats.common import SourceLine, format_number, iter_lines, parse_number
from modelforge.spatial import Mat3, Vec3, as_mat3, as_vec3

LENGTH_TOKEN = "length"

MeshDimension = float | str

# property -> number of values
_VECTOR_PROPERTIES = {"joint_offset": 3, "rotation": 3, "mesh_center": 3, "com": 3}
PROPERTIES = (
    "length",
    "scale_to",
    "joint_offset",
    "rotation",
    "mesh",
    "mesh_center",
    "mass",
    "com",
    "inertia",
)


@dataclass(frozen=True)
class SetupEntry:
    """Setup of one object segment type. Unset properties are ``None``."""

    segment_type: str
    length: float | None = None
    scale_to: str | None = None
    joint_offset: Vec3 | None = None
    rotation: Vec3 | None = None
    mesh_source: str | None = None
    mesh_dims: tuple[MeshDimension, ...] | None = None
    mesh_center: Vec3 | None = None
    mass: float | None = None
    com: Vec3 | None = None
    inertia: Mat3 | None = None

    @property
    def has_user_values(self) -> bool:
        return self.mass is not None


@dataclass(frozen=True)
class ObjectSetup:
    entries: dict[str, SetupEntry] = field(default_factory=dict)
    source: str | None = field(default=None, compare=False)

    def get(self, segment_type: str) -> SetupEntry:
        return self.entries.get(segment_type) or SetupEntry(segment_type)


def parse_object_setup(
    text: str, source: str = "<setup>", log: DiagnosticLog | None = None
) -> ObjectSetup:
    """Parse an object setup file.

    Raises:
        ParseError: ``UnknownKeyword``, ``WrongFieldCount``, ``NonNumericValue``,
            ``NegativeLength``, ``EmptyName`` or ``DuplicateEntry``.
    """
    file_log = DiagnosticLog(source)
    values: dict[str, dict[str, object]] = {}

    for line in iter_lines(text):
        fields_ = line.trimmed()
        if len(fields_) < 3:
            file_log.error(
                "WrongFieldCount",
                "expected 'segment_type, property, values'",
                line=line.number,
            )
            continue
        segment_type, prop = fields_[0], fields_[1].lower()
        if not segment_type:
            file_log.error("EmptyName", "segment type is empty", line=line.number)
            continue
        if prop not in PROPERTIES:
            file_log.error(
                "UnknownKeyword",
                f"unknown setup property {fields_[1]!r}",
                line=line.number,
                location=segment_type,
            )
            continue
        entry = values.setdefault(segment_type, {})
        if prop in entry or (prop == "mesh" and "mesh_source" in entry):
            file_log.error(
                "DuplicateEntry",
                f"{prop} of {segment_type} given more than once",
                line=line.number,
            )
            continue
        parsed = _parse_property(prop, fields_[2:], line, file_log)
        if parsed is not None:
            entry.update(parsed)

    if log is not None:
        log.extend(file_log)
    file_log.raise_if_errors()
    return ObjectSetup(
        entries={
            name: SetupEntry(segment_type=name, **kwargs)  # type: ignore[arg-type]
            for name, kwargs in values.items()
        },
        source=source,
    )


def _parse_property(
    prop: str, args: tuple[str, ...], line: SourceLine, log: DiagnosticLog
) -> dict[str, object] | None:
    def expect(count: int) -> bool:
        if len(args) != count:
            log.error(
                "WrongFieldCount",
                f"{prop} takes {count} value(s), got {len(args)}",
                line=line.number,
            )
            return False
        return True

    if prop == "scale_to":
        if not expect(1):
            return None
        return {"scale_to": args[0]}

    if prop == "mesh":
        if not 2 <= len(args) <= 4:
            log.error(
                "WrongFieldCount",
                f"mesh takes a kind or file and 1 to 3 dimensions, got {len(args)} values",
                line=line.number,
            )
            return None
        dims: list[MeshDimension] = []
        for raw in args[1:]:
            if raw.lower() == LENGTH_TOKEN:
                dims.append(LENGTH_TOKEN)
                continue
            number = parse_number(raw, log, line.number, "mesh dimension")
            if number is None:
                return None
            dims.append(number)
        return {"mesh_source": args[0], "mesh_dims": tuple(dims)}

    if prop in ("length", "mass"):
        if not expect(1):
            return None
        number = parse_number(args[0], log, line.number, prop)
        if number is None:
            return None
        if number < 0:
            log.error(
                "NegativeLength" if prop == "length" else "NegativeValue",
                f"{prop} must not be negative: {args[0]}",
                line=line.number,
            )
            return None
        return {prop: number}

    count = 9 if prop == "inertia" else _VECTOR_PROPERTIES[prop]
    if not expect(count):
        return None
    numbers = [parse_number(a, log, line.number, prop) for a in args]
    if any(n is None for n in numbers):
        return None
    if prop == "inertia":
        return {prop: as_mat3(numbers)}  # type: ignore[arg-type]
    return {prop: as_vec3(numbers)}  # type: ignore[arg-type]


def serialize_object_setup(setup: ObjectSetup) -> str:
    lines = []
    for entry in setup.entries.values():
        for f in fields(entry):
            value = getattr(entry, f.name)
            if f.name in ("segment_type", "mesh_dims") or value is None:
                continue
            if f.name == "mesh_source":
                dims = [
                    d if isinstance(d, str) else format_number(d)
                    for d in entry.mesh_dims or ()
                ]
                text = ", ".join(["mesh", value, *dims])
            elif f.name == "scale_to":
                text = f"scale_to, {value}"
            elif f.name == "inertia":
                text = "inertia, " + ", ".join(format_number(v) for r in value for v in r)
            elif isinstance(value, tuple):
                text = f"{f.name}, " + ", ".join(format_number(v) for v in value)
            else:
                text = f"{f.name}, {format_number(value)}"
            lines.append(f"{entry.segment_type}, {text}")
    return "\n".join(lines) + "\n"
