"""Kinematic trees of human and object models.

Segments are listed in topological order with ids ``1..n``; ``ROOT`` (the
world frame) has id 0. Each joint frame follows the RBDL convention: ``r`` is
the joint position in parent coordinates and ``E`` the rotation from parent
to child coordinates.
"""

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, replace
from enum import StrEnum
from pathlib import Path

import numpy as np

from modelforge.diagnostics import (
    BuildError,
    DiagnosticLog,
    DictionaryError,
    MeshError,
    ModelForgeError,
)
from modelforge.dictionary import Dictionary, JointDescriptor, LoopConstraintSet
from modelforge.formats.common import iter_lines, parse_numbers
from modelforge.formats.description import ROOT, DescriptionLine, ModelDescription
from modelforge.formats.environment import DEFAULT_GRAVITY
from modelforge.formats.markers import MarkerSpec, MarkerType
from modelforge.formats.setup import LENGTH_TOKEN, ObjectSetup, SetupEntry
from modelforge.mesh import (
    MassPolicy,
    MassPolicyKind,
    PrimitiveKind,
    Visual,
    apply_mass_policy,
    visual_mesh,
)
from modelforge.scaling import (
    HIP_SEGMENT_TYPES,
    AnthropometryProfile,
    Direction,
    JointOffsets,
    SegmentDefaults,
    compute_joint_offsets,
)
from modelforge.spatial import (
    IDENTITY3,
    ZERO3,
    ZERO33,
    Mat3,
    Vec3,
    as_mat3,
    as_vec3,
    euler_xyz_degrees,
)

logger = logging.getLogger(__name__)

HEAD_SEGMENT_TYPES = frozenset({"Head"})
FOOT_SEGMENT_TYPES = frozenset({"Foot", "Foot_R", "Foot_L"})
# length, width, height as fractions of foot length
FOOT_BOX_PROPORTIONS = (1.0, 0.4, 0.2)


class ModelKind(StrEnum):
    HUMAN = "human"
    OBJECT = "object"
    COMBINED = "combined"


class Functionality(StrEnum):
    """Rows of the human/object capability matrix."""

    ANTHROPOMETRY = "Anthropometry"
    MODEL_DESCRIPTION = "Model description"
    SCALING_ALGORITHMS = "Scaling algorithms"
    CUSTOM_SCALING = "Custom scaling"
    JOINT_TYPES = "Joint types"
    POINTS = "Points"
    POINT_CONSTRAINTS = "Point constraints"
    CUSTOM_MARKERS = "Custom markers"
    CUSTOM_SETUPS = "Custom setups"
    MASS_FROM_MESH = "Segment mass from mesh"
    MASS_FROM_USER = "Segment mass from user"


_H = frozenset({ModelKind.HUMAN})
_O = frozenset({ModelKind.OBJECT})
_HO = _H | _O
CAPABILITIES: dict[Functionality, frozenset[ModelKind]] = {
    Functionality.ANTHROPOMETRY: _H,
    Functionality.MODEL_DESCRIPTION: _HO,
    Functionality.SCALING_ALGORITHMS: _H,
    Functionality.CUSTOM_SCALING: _H,
    Functionality.JOINT_TYPES: _HO,
    Functionality.POINTS: _HO,
    Functionality.POINT_CONSTRAINTS: _HO,
    Functionality.CUSTOM_MARKERS: _HO,
    Functionality.CUSTOM_SETUPS: _O,
    Functionality.MASS_FROM_MESH: _O,
    Functionality.MASS_FROM_USER: _O,
}


@dataclass(frozen=True)
class JointFrame:
    r: Vec3 = ZERO3
    E: Mat3 = IDENTITY3


@dataclass(frozen=True)
class ConstraintRow:
    """One contact constraint of a subset, resolved to a segment point."""

    subset: str
    point: str
    normal: Vec3


@dataclass(frozen=True)
class ModelSegment:
    """One rigid body. Positions are metres in the segment frame."""

    id: int
    name: str
    segment_type: str
    parent_name: str
    parent_id: int
    joint: JointDescriptor
    joint_frame: JointFrame
    mass: float
    com: Vec3
    inertia: Mat3
    length: float
    visual: Visual | None = None
    points: tuple[tuple[str, Vec3], ...] = ()
    constraints: tuple[ConstraintRow, ...] = ()
    markers: tuple[tuple[str, Vec3], ...] = ()

    @property
    def dof(self) -> int:
        return self.joint.dof

    def point(self, name: str) -> Vec3 | None:
        return next((p for n, p in self.points if n == name), None)


@dataclass(frozen=True)
class LoopConstraint:
    """Loop constraint row between points on two different bodies."""

    name: str
    predecessor_body: str
    predecessor_point: str
    predecessor_position: Vec3
    successor_body: str
    successor_point: str
    successor_position: Vec3
    axis: tuple[int, int, int, int, int, int]


@dataclass(frozen=True)
class KinematicModel:
    kind: ModelKind
    name: str
    segments: tuple[ModelSegment, ...]
    loop_constraints: tuple[LoopConstraint, ...] = ()
    gravity: Vec3 = DEFAULT_GRAVITY
    provenance: tuple[tuple[str, str], ...] = ()
    features: frozenset[Functionality] = frozenset()

    def segment(self, name: str) -> ModelSegment | None:
        return next((s for s in self.segments if s.name == name), None)

    @property
    def dof(self) -> int:
        return sum(s.dof for s in self.segments)

    @property
    def total_mass(self) -> float:
        return math.fsum(s.mass for s in self.segments)

    def point_names(self) -> list[str]:
        return [n for s in self.segments for n, _ in s.points]

    def marker_names(self) -> list[str]:
        return [n for s in self.segments for n, _ in s.markers]

    def with_features(self, *features: Functionality) -> "KinematicModel":
        return replace(self, features=self.features | set(features))


def _point_scale(length: float) -> float:
    return length if length > 0 else 1.0


class _TreeBuilder:
    """Shared bookkeeping for human and object builds."""

    def __init__(
        self, description: ModelDescription, dictionary: Dictionary, log: DiagnosticLog
    ):
        self.description = description
        self.dictionary = dictionary
        self.log = log
        self.ids: dict[str, int] = {}
        self.segments: list[ModelSegment] = []
        self._positions: dict[str, int] = {}
        for i, line in enumerate(description):
            self._positions.setdefault(line.segment_name, i)
        self._parents = {line.segment_name: line.parent_name for line in description}

    def error(
        self,
        error: ModelForgeError | str,
        message: str = "",
        line: DescriptionLine | None = None,
    ) -> None:
        location = None
        if isinstance(error, ModelForgeError):
            code, message = error.code, error.message
            location = error.diagnostics[0].location if error.diagnostics else None
        else:
            code = error
        self.log.error(
            code,
            message,
            line=line.line if line else None,
            location=location or (line.segment_name if line else None),
            file=self.description.source,
        )

    def check_line(self, line: DescriptionLine) -> bool:
        """Name and parent checks; True when the line can be built."""
        name = line.segment_name
        if name in self.ids:
            self.error("DuplicateSegmentName", f"segment {name!r} defined twice", line)
            return False
        if line.parent_name == ROOT:
            return True
        if line.parent_name in self.ids:
            return True
        parent_position = self._positions.get(line.parent_name, len(self._positions))
        if parent_position < self._positions[name]:
            # parent already reported
            return False
        if self._is_cycle(name):
            self.error(
                "CycleDetected",
                f"parent chain of {name!r} loops back onto itself",
                line,
            )
        elif line.parent_name in self._positions:
            self.error(
                "DanglingParent",
                f"parent {line.parent_name!r} of {name!r} is listed after its child",
                line,
            )
        else:
            self.error(
                "DanglingParent",
                f"parent {line.parent_name!r} of {name!r} is not defined",
                line,
            )
        return False

    def _is_cycle(self, name: str) -> bool:
        seen = {name}
        current = self._parents.get(name)
        while current is not None and current != ROOT:
            if current in seen:
                return True
            seen.add(current)
            current = self._parents.get(current)
        return False

    def joint(self, line: DescriptionLine) -> JointDescriptor | None:
        try:
            return self.dictionary.resolve_joint(line.joint_code)
        except DictionaryError as e:
            self.error(e, line=line)
            return None

    def points(
        self,
        line: DescriptionLine,
        length: float,
        overrides: Mapping[str, Vec3] | None = None,
    ) -> tuple[tuple[str, Vec3], ...]:
        if line.point_set is None:
            return ()
        point_set = self.dictionary.point_sets.get(line.point_set)
        if point_set is None:
            self.error(
                "UnknownDictionaryName", f"unknown point set {line.point_set!r}", line
            )
            return ()
        scale = _point_scale(length)
        overrides = overrides or {}
        return tuple(
            (name, overrides.get(name) or as_vec3(np.asarray(coords) * scale))
            for name, coords in point_set.entries
        )

    def constraints(
        self, line: DescriptionLine, points: Sequence[tuple[str, Vec3]]
    ) -> tuple[ConstraintRow, ...]:
        if line.constraint_set is None:
            return ()
        constraint_set = self.dictionary.constraint_sets.get(line.constraint_set)
        if constraint_set is None:
            self.error(
                "UnknownDictionaryName",
                f"unknown constraint set {line.constraint_set!r}",
                line,
            )
            return ()
        names = {n for n, _ in points}
        rows = []
        for subset in constraint_set.subsets:
            for point, normal in subset.rows:
                if point not in names:
                    self.error(
                        "UnknownDictionaryName",
                        f"constraint set {constraint_set.name!r} uses point {point!r} "
                        f"which is not attached to {line.segment_name!r}",
                        line,
                    )
                    continue
                rows.append(ConstraintRow(subset.name, point, normal))
        return tuple(rows)

    def add(self, segment: ModelSegment) -> None:
        self.ids[segment.name] = segment.id
        self.segments.append(segment)

    def parent(self, line: DescriptionLine) -> ModelSegment | None:
        if line.parent_name == ROOT:
            return None
        return self.segments[self.ids[line.parent_name] - 1]

    def next_id(self) -> int:
        return len(self.segments) + 1


def _basic_features(description: ModelDescription) -> set[Functionality]:
    features = {Functionality.MODEL_DESCRIPTION, Functionality.JOINT_TYPES}
    if any(line.point_set for line in description):
        features.add(Functionality.POINTS)
    if any(line.constraint_set for line in description):
        features.add(Functionality.POINT_CONSTRAINTS)
    return features


def geometric_visual(defaults: SegmentDefaults) -> Visual:
    """Primitive visual sized from the segment's length and gyration radii.

    Feet are boxes, heads spheres, everything else a cylinder whose radius
    matches the longitudinal radius of gyration of a solid cylinder. Every
    shape is centred halfway along the segment.
    """
    L = defaults.ldefault
    u = np.asarray(defaults.direction.unit)
    center = as_vec3(u * L / 2.0)
    if defaults.segment_type in HEAD_SEGMENT_TYPES:
        return Visual(PrimitiveKind.SPHERE.value, (L, L, L), center)
    if defaults.segment_type in FOOT_SEGMENT_TYPES:
        length, width, height = (p * L for p in FOOT_BOX_PROPORTIONS)
        if defaults.direction == Direction.FORWARD:
            dims: Vec3 = (length, width, height)
        else:
            dims = (height, width, length)
        return Visual(PrimitiveKind.CUBOID.value, dims, center)
    radius = math.sqrt(2.0) * defaults.rgyr[2] * L
    return Visual(PrimitiveKind.CYLINDER.value, (2 * radius, 2 * radius, L), center)


def build_human_model(
    description: ModelDescription,
    dictionary: Dictionary,
    defaults: Sequence[SegmentDefaults],
    offsets: JointOffsets | None = None,
    profile: AnthropometryProfile | None = None,
    *,
    type_meshes: str = "geometric",
    name: str = "human",
    log: DiagnosticLog | None = None,
) -> KinematicModel:
    """Build a human kinematic tree from scaled segment defaults.

    Child joints sit at the parent's distal end; hip segments attach at the
    parent origin. Transverse offsets and anthropometric foot points come
    from ``offsets``. Each segment type may appear only once: its scaled
    mass is a share of the whole body.

    Args:
        description: Parsed model description.
        dictionary: Joint, point and constraint set lookup.
        defaults: Scaled properties for every segment type in the description.
        offsets: Joint offsets and foot points from ``compute_joint_offsets``.
        profile: Used to compute ``offsets`` when they are not given.
        type_meshes: ``geometric`` or ``detailed`` visuals.
        name: Model name.
        log: Receives warnings and errors.

    Returns:
        The human model.

    Raises:
        BuildError: with every error found in the description.
    """
    log = log if log is not None else DiagnosticLog(description.source)
    build_log = DiagnosticLog(description.source)
    builder = _TreeBuilder(description, dictionary, build_log)
    if offsets is None:
        offsets = (
            compute_joint_offsets(profile, defaults) if profile else JointOffsets()
        )
    by_type = {d.segment_type: d for d in defaults}
    type_owner: dict[str, str] = {}

    if type_meshes == "detailed":
        build_log.warning(
            "DetailedMeshUnavailable",
            "detailed meshes are not bundled; using geometric shapes",
        )

    for line in description:
        if not builder.check_line(line):
            continue
        owner = type_owner.setdefault(line.segment_type, line.segment_name)
        if owner != line.segment_name:
            builder.error(
                "DuplicateSegmentType",
                f"segment type {line.segment_type!r} is already used by {owner!r};"
                " each type carries its scaled mass once",
                line,
            )
            continue
        joint = builder.joint(line)
        segment_defaults = by_type.get(line.segment_type)
        if segment_defaults is None:
            builder.error(
                "UnknownSegmentType",
                f"segment type {line.segment_type!r} has no scaled defaults",
                line,
            )
        if joint is None or segment_defaults is None:
            continue

        parent = builder.parent(line)
        r = np.zeros(3)
        if parent is not None:
            if line.segment_type not in HIP_SEGMENT_TYPES:
                r = np.asarray(by_type[parent.segment_type].distal)
            r = r + np.asarray(offsets.joints.get(line.segment_type, ZERO3))

        length = segment_defaults.ldefault
        points = builder.points(line, length, offsets.points)
        builder.add(
            ModelSegment(
                id=builder.next_id(),
                name=line.segment_name,
                segment_type=line.segment_type,
                parent_name=line.parent_name,
                parent_id=builder.ids.get(line.parent_name, 0),
                joint=joint,
                joint_frame=JointFrame(as_vec3(r), IDENTITY3),
                mass=segment_defaults.mdefault,
                com=segment_defaults.com_local,
                inertia=segment_defaults.inertia_local,
                length=length,
                visual=geometric_visual(segment_defaults),
                points=points,
                constraints=builder.constraints(line, points),
            )
        )

    log.extend(build_log)
    build_log.raise_if_errors(BuildError)

    features = _basic_features(description) | {
        Functionality.ANTHROPOMETRY,
        Functionality.SCALING_ALGORITHMS,
    }
    model = KinematicModel(
        kind=ModelKind.HUMAN,
        name=name,
        segments=tuple(builder.segments),
        features=frozenset(features),
    )
    logger.info(
        "Built human model %s: %d segments, %d DoF, %.3f kg",
        name,
        len(model.segments),
        model.dof,
        model.total_mass,
    )
    return model


def _object_visual(
    entry: SetupEntry,
    length: float,
    line: DescriptionLine,
    builder: _TreeBuilder,
    base_dir: Path | None,
) -> Visual | None:
    if entry.mesh_source is None:
        return None
    dims = [length if d == LENGTH_TOKEN else float(d) for d in entry.mesh_dims or ()]
    center = entry.mesh_center or (0.0, 0.0, -length / 2.0)
    source = entry.mesh_source
    kind = source.lower()

    expected = {"cuboid": 3, "cylinder": 2, "sphere": 1}.get(kind, 3)
    if len(dims) != expected:
        builder.error(
            "InvalidDimensions",
            f"mesh {source!r} takes {expected} dimensions, got {len(dims)}",
            line,
        )
        return None
    if any(not d > 0 for d in dims):
        builder.error(
            "NonPositiveDimension", f"mesh dimensions must be positive: {dims}", line
        )
        return None

    if kind == PrimitiveKind.CYLINDER:
        extents: Vec3 = (2 * dims[0], 2 * dims[0], dims[1])
    elif kind == PrimitiveKind.SPHERE:
        extents = (2 * dims[0], 2 * dims[0], 2 * dims[0])
    else:
        extents = as_vec3(dims)
    if kind in {k.value for k in PrimitiveKind}:
        source = kind
    else:
        from modelforge.config import get_config

        candidates = [Path(source)] if Path(source).is_absolute() else [
            *([base_dir / source] if base_dir is not None else []),
            get_config().meshes_dir / source,
        ]
        if not any(c.is_file() for c in candidates):
            builder.error("UnknownMeshRef", f"mesh {source!r} was not found", line)
            return None
    return Visual(source, extents, as_vec3(center))


def build_object_model(
    description: ModelDescription,
    dictionary: Dictionary,
    setup: ObjectSetup,
    mass_policies: Mapping[str, MassPolicy] | None = None,
    human: KinematicModel | None = None,
    *,
    name: str = "object",
    base_dir: Path | None = None,
    log: DiagnosticLog | None = None,
) -> KinematicModel:
    """Build an object model from its description and declarative setup.

    Segment lengths are literal or copied from a human segment via
    ``scale_to`` (which also copies the human joint position unless
    ``joint_offset`` is set). Mass policies from the mass-properties file,
    looked up by segment name and then segment type, take precedence over
    mass values in the setup.

    Raises:
        BuildError: ``MissingHumanContext``, ``UnknownMassPolicy``,
            ``UnknownMeshRef``, ``MissingMesh`` and the tree errors of
            :func:`build_human_model`.
    """
    log = log if log is not None else DiagnosticLog(description.source)
    build_log = DiagnosticLog(description.source)
    builder = _TreeBuilder(description, dictionary, build_log)
    mass_policies = mass_policies or {}
    features = _basic_features(description) | {Functionality.CUSTOM_SETUPS}

    known = {n for d in description for n in (d.segment_name, d.segment_type)}
    for key, policy in mass_policies.items():
        if key not in known:
            build_log.error(
                "UnknownMassPolicy",
                f"mass policy given for unknown segment {key!r}",
                line=policy.line,
                location=key,
            )

    for line in description:
        if not builder.check_line(line):
            continue
        joint = builder.joint(line)
        if joint is None:
            continue
        entry = setup.get(line.segment_type)
        parent = builder.parent(line)

        human_segment = None
        if entry.scale_to is not None:
            human_segment = human.segment(entry.scale_to) if human else None
            if human_segment is None:
                builder.error(
                    "MissingHumanContext",
                    f"{line.segment_name} scales to {entry.scale_to!r} but "
                    + (
                        "no human model is available"
                        if human is None
                        else "the human model has no such segment"
                    ),
                    line,
                )
                continue
            length = human_segment.length
        else:
            length = entry.length or 0.0

        if entry.joint_offset is not None:
            r = entry.joint_offset
        elif human_segment is not None:
            r = human_segment.joint_frame.r
        elif parent is not None:
            r = (0.0, 0.0, -parent.length)
        else:
            r = ZERO3
        E = IDENTITY3
        if entry.rotation is not None:
            E = as_mat3(euler_xyz_degrees(entry.rotation).T)

        visual = _object_visual(entry, length, line, builder, base_dir)
        mass, com, inertia = 0.0, ZERO3, ZERO33
        policy = mass_policies.get(line.segment_name) or mass_policies.get(
            line.segment_type
        )
        if policy is None and entry.has_user_values:
            policy = MassPolicy(
                line.segment_name,
                MassPolicyKind.USE_USER_VALUES,
                mass=entry.mass,
                com=entry.com or ZERO3,
                inertia=entry.inertia or ZERO33,
            )
        if policy is None:
            build_log.warning(
                "NoMassPolicy",
                f"{line.segment_name} has no mass policy; mass set to zero",
                line=line.line,
                location=line.segment_name,
            )
        else:
            try:
                mesh = visual_mesh(visual, base_dir=base_dir) if visual else None
                props = apply_mass_policy(policy, mesh)
            except MeshError as e:
                builder.error(e, line=line)
                continue
            mass, com, inertia = props.mass, props.com, props.inertia
            features.add(
                Functionality.MASS_FROM_MESH
                if policy.kind == MassPolicyKind.USE_MEAN_DENSITY
                else Functionality.MASS_FROM_USER
            )

        points = builder.points(line, length)
        builder.add(
            ModelSegment(
                id=builder.next_id(),
                name=line.segment_name,
                segment_type=line.segment_type,
                parent_name=line.parent_name,
                parent_id=builder.ids.get(line.parent_name, 0),
                joint=joint,
                joint_frame=JointFrame(r, E),
                mass=mass,
                com=com,
                inertia=inertia,
                length=length,
                visual=visual,
                points=points,
                constraints=builder.constraints(line, points),
            )
        )

    log.extend(build_log)
    build_log.raise_if_errors(BuildError)
    model = KinematicModel(
        kind=ModelKind.OBJECT,
        name=name,
        segments=tuple(builder.segments),
        features=frozenset(features),
    )
    logger.info(
        "Built object model %s: %d segments, %d DoF, %.3f kg",
        name,
        len(model.segments),
        model.dof,
        model.total_mass,
    )
    return model


def cluster_layout(marker_type: MarkerType, distance: float) -> np.ndarray:
    """Cluster-local marker positions before rotation and translation."""
    single = np.zeros((1, 3))
    if marker_type == MarkerType.MARKER:
        return single
    cluster = np.array([[0.0, 0.0, 0.0], [distance, 0.0, 0.0], [0.0, 0.0, distance]])
    if marker_type == MarkerType.CLUSTER:
        return cluster
    return np.vstack([cluster, cluster + [0.0, distance, 0.0]])


def place_markers(
    model: KinematicModel, spec: MarkerSpec, log: DiagnosticLog | None = None
) -> KinematicModel:
    """Attach custom markers.

    Marker offsets are rotated by the row's intrinsic X-Y-Z Euler angles
    (degrees), then translated by the row translation times the segment
    length (times 1 for zero-length segments).

    Raises:
        BuildError: ``UnknownSegment``, ``NameCountMismatch`` or
            ``DuplicateMarkerName``.
    """
    log = log if log is not None else DiagnosticLog(spec.source)
    marker_log = DiagnosticLog(spec.source)
    existing = set(model.marker_names())
    added: dict[str, list[tuple[str, Vec3]]] = {}

    for row in spec.rows:
        segment = model.segment(row.segment)
        if segment is None:
            marker_log.error(
                "UnknownSegment",
                f"markers reference unknown segment {row.segment!r}",
                line=row.line,
                location=row.segment,
            )
            continue
        if len(row.names) != row.marker_type.name_count:
            marker_log.error(
                "NameCountMismatch",
                f"{row.marker_type.value} needs {row.marker_type.name_count} names, "
                f"got {len(row.names)}",
                line=row.line,
                location=row.segment,
            )
            continue
        R = euler_xyz_degrees(row.rotation)
        t = np.asarray(row.translation) * _point_scale(segment.length)
        positions = cluster_layout(row.marker_type, row.distance) @ R.T + t
        for marker, position in zip(row.names, positions, strict=True):
            if marker in existing:
                marker_log.error(
                    "DuplicateMarkerName",
                    f"marker {marker!r} is already attached",
                    line=row.line,
                    location=row.segment,
                )
                continue
            existing.add(marker)
            added.setdefault(segment.name, []).append((marker, as_vec3(position)))

    log.extend(marker_log)
    marker_log.raise_if_errors(BuildError)
    return _with_markers(model, added).with_features(Functionality.CUSTOM_MARKERS)


def _with_markers(
    model: KinematicModel, added: Mapping[str, list[tuple[str, Vec3]]]
) -> KinematicModel:
    segments = tuple(
        replace(s, markers=s.markers + tuple(added[s.name])) if s.name in added else s
        for s in model.segments
    )
    return replace(model, segments=segments)


@dataclass(frozen=True)
class DefaultMarker:
    segment_types: tuple[str, ...]
    name: str
    position: Vec3


def load_default_markerset(path: Path | None = None) -> list[DefaultMarker]:
    """Read the bundled markerset: ``type[|type...], marker, x, y, z``."""
    from modelforge.config import get_config

    path = path or get_config().markerset_path
    log = DiagnosticLog(str(path))
    markers = []
    for line in iter_lines(path.read_text(encoding="utf-8")):
        if len(line) != 5:
            log.error("WrongFieldCount", "expected 5 fields", line=line.number)
            continue
        coords = parse_numbers(line.fields[2:], log, line.number, "marker position")
        if coords is None:
            continue
        types = tuple(t.strip() for t in line.fields[0].split("|"))
        markers.append(DefaultMarker(types, line.fields[1], as_vec3(coords)))
    log.raise_if_errors()
    return markers


def add_default_markerset(
    model: KinematicModel,
    log: DiagnosticLog,
    markerset: Iterable[DefaultMarker] | None = None,
) -> KinematicModel:
    """Attach the default markerset to segments of matching type.

    Positions are fractions of the segment length. Markers whose segment
    types are absent are skipped with a ``MarkerSegmentSkipped`` warning;
    names already attached are reported as ``DuplicateMarkerName`` and
    skipped.
    """
    markerset = load_default_markerset() if markerset is None else markerset
    existing = set(model.marker_names())
    added: dict[str, list[tuple[str, Vec3]]] = {}
    for marker in markerset:
        segment = next(
            (
                s
                for t in marker.segment_types
                for s in model.segments
                if s.segment_type == t
            ),
            None,
        )
        if segment is None:
            log.warning(
                "MarkerSegmentSkipped",
                f"default marker {marker.name} skipped: no segment of type "
                f"{' or '.join(marker.segment_types)}",
                location=marker.name,
            )
            continue
        if marker.name in existing:
            log.error(
                "DuplicateMarkerName",
                f"marker {marker.name!r} is already attached",
                location=segment.name,
            )
            continue
        existing.add(marker.name)
        position = as_vec3(np.asarray(marker.position) * _point_scale(segment.length))
        added.setdefault(segment.name, []).append((marker.name, position))
    logger.debug("Attached %d default markers", sum(len(v) for v in added.values()))
    return _with_markers(model, added)


Frame = tuple[np.ndarray, np.ndarray]


def reference_pose_frames(model: KinematicModel) -> dict[str, Frame]:
    """World rotation and translation of every segment with all joints at zero.

    ``ROOT`` maps to the identity.
    """
    frames: dict[str, Frame] = {ROOT: (np.eye(3), np.zeros(3))}
    for segment in model.segments:
        R_parent, t_parent = frames[segment.parent_name]
        E = np.asarray(segment.joint_frame.E)
        r = np.asarray(segment.joint_frame.r)
        frames[segment.name] = (R_parent @ E.T, t_parent + R_parent @ r)
    return frames


def resolve_loop_constraints(
    loop_set: LoopConstraintSet, model: KinematicModel
) -> tuple[LoopConstraint, ...]:
    """Resolve loop rows to point positions on the model's bodies.

    Raises:
        BuildError: ``InvalidLoopConstraint`` for unknown bodies or points.
    """
    log = DiagnosticLog()
    resolved = []
    for row in loop_set.rows:
        positions = []
        for body, point in (row.predecessor, row.successor):
            segment = model.segment(body)
            position = segment.point(point) if segment else None
            if position is None:
                log.error(
                    "InvalidLoopConstraint",
                    f"loop set {loop_set.name!r}: point {point!r} on body {body!r} "
                    f"is not part of model {model.name!r}",
                    location=loop_set.name,
                )
            positions.append(position)
        if positions[0] is None or positions[1] is None:
            continue
        resolved.append(
            LoopConstraint(
                name=loop_set.name,
                predecessor_body=row.predecessor[0],
                predecessor_point=row.predecessor[1],
                predecessor_position=positions[0],
                successor_body=row.successor[0],
                successor_point=row.successor[1],
                successor_position=positions[1],
                axis=row.axis,
            )
        )
    log.raise_if_errors(BuildError)
    return tuple(resolved)


def loop_set_fits(loop_set: LoopConstraintSet, model: KinematicModel) -> bool:
    """True when every body named by the loop set is a segment of ``model``."""
    return all(
        model.segment(body) is not None
        for row in loop_set.rows
        for body in (row.predecessor[0], row.successor[0])
    )


def with_loop_constraints(
    model: KinematicModel, loops: Iterable[LoopConstraint]
) -> KinematicModel:
    return replace(model, loop_constraints=model.loop_constraints + tuple(loops))


def combine_models(
    human: KinematicModel,
    objects: Sequence[KinematicModel],
    log: DiagnosticLog | None = None,
    name: str = "combined",
) -> KinematicModel:
    """Collate a human and its objects into one tree.

    Human segments come first, then each object's segments in order. Object
    segment, point and marker names that collide with names already in the
    tree are prefixed ``Object<k>_`` (``k`` is the 1-based object index) and
    reported as ``NameCollision`` warnings. Object loop rows follow the renamed
    bodies and points.
    """
    log = log if log is not None else DiagnosticLog()
    segments = list(human.segments)
    loops = list(human.loop_constraints)
    segment_names = {s.name for s in segments}
    point_names = set(human.point_names())
    marker_names = set(human.marker_names())

    for k, obj in enumerate(objects, start=1):
        prefix = f"Object{k}_"

        def rename(
            value: str,
            taken: set[str],
            what: str,
            prefix: str = prefix,
            owner: str = obj.name,
        ) -> str:
            if value not in taken:
                return value
            log.warning(
                "NameCollision",
                f"{what} {value!r} of {owner} renamed to {prefix + value!r}",
                location=value,
            )
            return prefix + value

        renamed = {
            s.name: rename(s.name, segment_names, "segment") for s in obj.segments
        }
        segment_names.update(renamed.values())
        offset = len(segments)
        renamed_points: dict[tuple[str, str], str] = {}

        for segment in obj.segments:
            points = {n: rename(n, point_names, "point") for n, _ in segment.points}
            point_names.update(points.values())
            renamed_points.update(((segment.name, n), m) for n, m in points.items())
            markers = tuple(
                (rename(n, marker_names, "marker"), p) for n, p in segment.markers
            )
            marker_names.update(n for n, _ in markers)
            segments.append(
                replace(
                    segment,
                    id=segment.id + offset,
                    name=renamed[segment.name],
                    parent_name=renamed.get(segment.parent_name, segment.parent_name),
                    parent_id=segment.parent_id + offset if segment.parent_id else 0,
                    points=tuple((points[n], p) for n, p in segment.points),
                    constraints=tuple(
                        replace(c, point=points.get(c.point, c.point))
                        for c in segment.constraints
                    ),
                    markers=markers,
                )
            )
        for loop in obj.loop_constraints:
            loops.append(
                replace(
                    loop,
                    predecessor_body=renamed.get(
                        loop.predecessor_body, loop.predecessor_body
                    ),
                    predecessor_point=renamed_points.get(
                        (loop.predecessor_body, loop.predecessor_point),
                        loop.predecessor_point,
                    ),
                    successor_body=renamed.get(
                        loop.successor_body, loop.successor_body
                    ),
                    successor_point=renamed_points.get(
                        (loop.successor_body, loop.successor_point),
                        loop.successor_point,
                    ),
                )
            )

    return KinematicModel(
        kind=ModelKind.COMBINED,
        name=name,
        segments=tuple(segments),
        loop_constraints=tuple(loops),
        gravity=human.gravity,
        provenance=tuple(
            dict.fromkeys(
                [*human.provenance, *(p for o in objects for p in o.provenance)]
            )
        ),
        features=human.features.union(*(o.features for o in objects)),
    )
