"""Dictionary of joint types, point sets, constraint sets and loop constraints."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

from modelforge.diagnostics import DiagnosticLog, DictionaryError
from modelforge.spatial import Vec3

logger = logging.getLogger(__name__)

AXES = "XYZ"
KIND_OFFSET = {"R": 0, "T": 3}

Axis6 = tuple[int, int, int, int, int, int]


@dataclass(frozen=True)
class JointDescriptor:
    """Motion subspace of a joint, one 6-vector row per degree of freedom.

    Row index order is rot X, rot Y, rot Z, trans X, trans Y, trans Z.
    """

    code: str
    rows: tuple[Axis6, ...]
    custom_payload: str | None = None

    @property
    def dof(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class PointSet:
    """Named landmarks in segment-length fractions of the local frame."""

    name: str
    entries: tuple[tuple[str, Vec3], ...]

    def point_names(self) -> list[str]:
        return [name for name, _ in self.entries]


@dataclass(frozen=True)
class ConstraintSubset:
    name: str
    rows: tuple[tuple[str, Vec3], ...]


@dataclass(frozen=True)
class ConstraintSet:
    """Groups of (point, base-frame normal) contact constraints."""

    name: str
    subsets: tuple[ConstraintSubset, ...]

    def subset(self, name: str) -> ConstraintSubset | None:
        return next((s for s in self.subsets if s.name == name), None)


@dataclass(frozen=True)
class LoopRow:
    predecessor: tuple[str, str]
    successor: tuple[str, str]
    axis: Axis6


@dataclass(frozen=True)
class LoopConstraintSet:
    """Constraints between points on two different bodies."""

    name: str
    rows: tuple[LoopRow, ...]


@dataclass(frozen=True)
class Dictionary:
    """Immutable lookup tables; unknown names return ``None``."""

    joints: dict[str, JointDescriptor] = field(default_factory=dict)
    point_sets: dict[str, PointSet] = field(default_factory=dict)
    constraint_sets: dict[str, ConstraintSet] = field(default_factory=dict)
    loop_sets: dict[str, LoopConstraintSet] = field(default_factory=dict)

    def __len__(self) -> int:
        return (
            len(self.joints)
            + len(self.point_sets)
            + len(self.constraint_sets)
            + len(self.loop_sets)
        )

    def resolve_joint(self, token: str) -> JointDescriptor:
        """Look up a joint by name, by ``Joint_<token>``, or parse it as a code."""
        descriptor = self.joints.get(token) or self.joints.get(f"Joint_{token}")
        if descriptor is not None:
            return descriptor
        try:
            return parse_joint_code(token)
        except DictionaryError:
            if "_" in token:
                raise DictionaryError(
                    "UnknownDictionaryName", f"unknown joint type {token!r}"
                ) from None
            raise


def parse_joint_code(code: str) -> JointDescriptor:
    """Parse a token string such as ``"TXTZRY"`` into a motion subspace.

    Parsing is case-insensitive; the returned code is uppercase.

    Raises:
        DictionaryError: ``MalformedJointCode`` for empty, odd-length or
            unknown tokens.
    """
    canonical = code.strip().upper()
    if not canonical:
        raise DictionaryError("MalformedJointCode", "empty joint code")
    if len(canonical) % 2:
        raise DictionaryError(
            "MalformedJointCode", f"joint code {code!r} has odd length"
        )

    rows: list[Axis6] = []
    for i in range(0, len(canonical), 2):
        kind, axis = canonical[i], canonical[i + 1]
        if kind not in KIND_OFFSET or axis not in AXES:
            raise DictionaryError(
                "MalformedJointCode",
                f"joint code {code!r}: unknown token {canonical[i:i + 2]!r}",
            )
        row = [0, 0, 0, 0, 0, 0]
        row[KIND_OFFSET[kind] + AXES.index(axis)] = 1
        rows.append((row[0], row[1], row[2], row[3], row[4], row[5]))
    return JointDescriptor(code=canonical, rows=tuple(rows))


def serialize_joint_code(descriptor: JointDescriptor) -> str:
    """Inverse of :func:`parse_joint_code`."""
    tokens = []
    for row in descriptor.rows:
        index = row.index(1)
        tokens.append(("R" if index < 3 else "T") + AXES[index % 3])
    return "".join(tokens)


def merge_custom_dictionary(
    base: Dictionary, extension: Dictionary, log: DiagnosticLog | None = None
) -> Dictionary:
    """Union of two dictionaries; extension entries override base entries.

    Each override is recorded as a ``DictionaryOverride`` warning.
    """
    merged = {}
    for section in ("joints", "point_sets", "constraint_sets", "loop_sets"):
        entries = dict(getattr(base, section))
        for name, value in getattr(extension, section).items():
            if name in entries and log is not None:
                log.warning(
                    "DictionaryOverride",
                    f"custom definition overrides built-in {section} entry {name!r}",
                    location=name,
                )
            entries[name] = value
        merged[section] = entries
    return Dictionary(**merged)


def builtin_dictionary(path: Path | None = None) -> Dictionary:
    """Load the bundled dictionary file."""
    from modelforge.config import get_config
    from modelforge.formats.dictionary_file import parse_dictionary

    path = path or get_config().dictionary_path
    return parse_dictionary(path.read_text(encoding="utf-8"), source=str(path))


def load_custom_dictionaries(
    manifest: Path, base: Dictionary, log: DiagnosticLog
) -> Dictionary:
    """Merge every dictionary file listed in a manifest, in order.

    The manifest holds one path per line, relative to the manifest itself.
    """
    from modelforge.formats.common import iter_lines
    from modelforge.formats.dictionary_file import parse_dictionary

    result = base
    for line in iter_lines(manifest.read_text(encoding="utf-8"), comment_chars="#%"):
        path = manifest.parent / line.fields[0]
        if not path.is_file():
            log.error(
                "MissingFile",
                f"custom dictionary file not found: {path}",
                line=line.number,
                file=str(manifest),
            )
            continue
        logger.info("Loading custom dictionary %s", path)
        extension = parse_dictionary(path.read_text(encoding="utf-8"), source=str(path))
        result = merge_custom_dictionary(result, extension, log)
    return result
