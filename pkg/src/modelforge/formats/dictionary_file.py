"""Declarative dictionary files: ``[joints]``, ``[points]``, ``[constraints]``, ``[loops]``."""

import math
from collections import defaultdict

from modelforge.diagnostics import DictionaryError, DiagnosticLog
from modelforge.dictionary import (
    ConstraintSet,
    ConstraintSubset,
    Dictionary,
    JointDescriptor,
    LoopConstraintSet,
    LoopRow,
    PointSet,
    parse_joint_code,
    serialize_joint_code,
)
from modelforge.formats.common import format_number, iter_lines, parse_numbers
from modelforge.spatial import Vec3, as_vec3

SECTIONS = ("joints", "points", "constraints", "loops")
UNIT_TOLERANCE = 1e-9


def parse_dictionary(
    text: str, source: str = "<dictionary>", log: DiagnosticLog | None = None
) -> Dictionary:
    """Parse a dictionary file.

    Raises:
        ParseError: with every located error in the file.
    """
    log = log if log is not None else DiagnosticLog(source)
    file_log = DiagnosticLog(source)

    joints: dict[str, JointDescriptor] = {}
    points: dict[str, list[tuple[str, Vec3]]] = defaultdict(list)
    constraints: dict[str, dict[str, list[tuple[str, Vec3]]]] = defaultdict(dict)
    loops: dict[str, list[LoopRow]] = defaultdict(list)
    section: str | None = None

    for line in iter_lines(text, comment_chars="#%"):
        first = line.fields[0]
        if len(line) == 1 and first.startswith("[") and first.endswith("]"):
            section = first[1:-1].strip().lower()
            if section not in SECTIONS:
                file_log.error(
                    "UnknownSection", f"unknown section {first}", line=line.number
                )
                section = None
            continue
        if section is None:
            file_log.error(
                "MalformedDictionaryLine",
                "entry outside of a known section",
                line=line.number,
            )
            continue

        if section == "joints":
            _parse_joint(line.fields, line.number, joints, file_log)
        elif section == "points":
            _parse_point(line.fields, line.number, points, file_log)
        elif section == "constraints":
            _parse_constraint(line.fields, line.number, constraints, file_log)
        else:
            _parse_loop(line.fields, line.number, loops, file_log)

    log.extend(file_log)
    file_log.raise_if_errors()

    return Dictionary(
        joints=joints,
        point_sets={
            name: PointSet(name, tuple(entries)) for name, entries in points.items()
        },
        constraint_sets={
            name: ConstraintSet(
                name,
                tuple(
                    ConstraintSubset(subset, tuple(rows))
                    for subset, rows in subsets.items()
                ),
            )
            for name, subsets in constraints.items()
        },
        loop_sets={
            name: LoopConstraintSet(name, tuple(rows)) for name, rows in loops.items()
        },
    )


def _parse_joint(
    fields: tuple[str, ...],
    number: int,
    joints: dict[str, JointDescriptor],
    log: DiagnosticLog,
) -> None:
    if len(fields) < 2 or not fields[0]:
        log.error(
            "MalformedDictionaryLine", "joint entry needs: name, code", line=number
        )
        return
    name, code = fields[0], fields[1]
    payload = ", ".join(fields[2:]) if len(fields) > 2 else None
    try:
        descriptor = parse_joint_code(code)
    except DictionaryError as e:
        log.error(e.code, e.message, line=number, location=name)
        return
    if name in joints:
        log.error("DuplicateEntry", f"joint {name!r} defined twice", line=number)
        return
    joints[name] = JointDescriptor(descriptor.code, descriptor.rows, payload or None)


def _parse_point(
    fields: tuple[str, ...],
    number: int,
    points: dict[str, list[tuple[str, Vec3]]],
    log: DiagnosticLog,
) -> None:
    if len(fields) != 5 or not fields[0] or not fields[1]:
        log.error(
            "MalformedDictionaryLine",
            "point entry needs: set, point, x, y, z",
            line=number,
        )
        return
    coords = parse_numbers(fields[2:], log, number, "point coordinate")
    if coords is None:
        return
    set_name, point_name = fields[0], fields[1]
    if any(existing == point_name for existing, _ in points[set_name]):
        log.error(
            "DuplicatePointName",
            f"point {point_name!r} repeated in set {set_name!r}",
            line=number,
        )
        return
    points[set_name].append((point_name, as_vec3(coords)))


def _parse_constraint(
    fields: tuple[str, ...],
    number: int,
    constraints: dict[str, dict[str, list[tuple[str, Vec3]]]],
    log: DiagnosticLog,
) -> None:
    if len(fields) != 6 or not all(fields[:3]):
        log.error(
            "MalformedDictionaryLine",
            "constraint entry needs: set, subset, point, nx, ny, nz",
            line=number,
        )
        return
    normal = parse_numbers(fields[3:], log, number, "constraint normal")
    if normal is None:
        return
    if abs(math.hypot(*normal) - 1.0) > UNIT_TOLERANCE:
        log.error(
            "NonUnitNormal",
            f"normal {tuple(normal)} of {fields[2]!r} is not a unit vector",
            line=number,
        )
        return
    subsets = constraints[fields[0]]
    subsets.setdefault(fields[1], []).append((fields[2], as_vec3(normal)))


def _parse_loop(
    fields: tuple[str, ...],
    number: int,
    loops: dict[str, list[LoopRow]],
    log: DiagnosticLog,
) -> None:
    if len(fields) != 11 or not all(fields[:5]):
        log.error(
            "MalformedDictionaryLine",
            "loop entry needs: set, pred_body, pred_point, succ_body, succ_point, "
            "and a 6-element axis",
            line=number,
        )
        return
    axis = parse_numbers(fields[5:], log, number, "loop axis")
    if axis is None:
        return
    if fields[1] == fields[3]:
        log.error(
            "LoopSameBody",
            f"loop row in {fields[0]!r} connects body {fields[1]!r} to itself",
            line=number,
        )
        return
    a = [int(v) if float(v).is_integer() else v for v in axis]
    loops[fields[0]].append(
        LoopRow(
            predecessor=(fields[1], fields[2]),
            successor=(fields[3], fields[4]),
            axis=(a[0], a[1], a[2], a[3], a[4], a[5]),  # type: ignore[arg-type]
        )
    )


def serialize_dictionary(dictionary: Dictionary) -> str:
    """Render a dictionary in the file format accepted by :func:`parse_dictionary`."""
    lines = ["[joints]"]
    for name, joint in dictionary.joints.items():
        entry = f"{name}, {serialize_joint_code(joint)}"
        if joint.custom_payload:
            entry += f", {joint.custom_payload}"
        lines.append(entry)

    lines += ["", "[points]"]
    for name, point_set in dictionary.point_sets.items():
        for point, coords in point_set.entries:
            lines.append(f"{name}, {point}, {_vec(coords)}")

    lines += ["", "[constraints]"]
    for name, constraint_set in dictionary.constraint_sets.items():
        for subset in constraint_set.subsets:
            for point, normal in subset.rows:
                lines.append(f"{name}, {subset.name}, {point}, {_vec(normal)}")

    lines += ["", "[loops]"]
    for name, loop_set in dictionary.loop_sets.items():
        for row in loop_set.rows:
            axis = ", ".join(str(v) for v in row.axis)
            lines.append(
                f"{name}, {row.predecessor[0]}, {row.predecessor[1]}, "
                f"{row.successor[0]}, {row.successor[1]}, {axis}"
            )
    return "\n".join(lines) + "\n"


def _vec(values: Vec3) -> str:
    return ", ".join(format_number(v) for v in values)
