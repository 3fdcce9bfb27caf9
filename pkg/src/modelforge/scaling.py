"""Anthropometric scaling of human segments.

Scaling tables map each segment type to regression fractions (length, mass,
centre of mass, radii of gyration). Segment inertia is parameterized by the
radii of gyration, ``I_axis = m * (rgyr_axis * L) ** 2`` about the centre of
mass, so it can be recomputed whenever lengths or masses change.
"""

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path

from modelforge.diagnostics import ScalingError
from modelforge.spatial import Mat3, Vec3, diag3

logger = logging.getLogger(__name__)


class Gender(StrEnum):
    MALE = "male"
    FEMALE = "female"


class Direction(StrEnum):
    """Axis along which a segment extends from its origin."""

    DOWN = "down"
    UP = "up"
    FORWARD = "forward"

    @property
    def unit(self) -> Vec3:
        return _DIRECTION_UNITS[self]


_DIRECTION_UNITS: dict[Direction, Vec3] = {
    Direction.DOWN: (0.0, 0.0, -1.0),
    Direction.UP: (0.0, 0.0, 1.0),
    Direction.FORWARD: (1.0, 0.0, 0.0),
}


class AlgorithmId(StrEnum):
    """Bundled scaling tables; ``custom`` marks a user-supplied table."""

    DELEVA_3SEG_TORSO = "deleva_3seg_torso"
    DELEVA_FUSED_TORSO = "deleva_fused_torso"
    DELEVA_SAGITTAL = "deleva_sagittal"
    JENSEN_CHILD = "jensen_child"
    CUSTOM = "custom"


# Anthropometry file keyword -> profile attribute
ANTHROPOMETRY_KEYWORDS: dict[str, str] = {
    "gender": "gender",
    "age": "age",
    "height": "height",
    "weight": "weight",
    "pelvisWidth": "pelvis_width",
    "hipCenterDistance": "hip_center_distance",
    "shoulderCenterDistance": "shoulder_center_distance",
    "footLength": "foot_length",
    "footWidth": "foot_width",
    "heelAnkleOffset": "heel_ankle_offset",
    "ankleHeight": "ankle_height",
}

HIP_SEGMENT_TYPES = frozenset({"Thigh", "Thigh_R", "Thigh_L"})
_BILATERAL_OFFSETS = {
    "Thigh_R": ("hip_center_distance", -1.0),
    "Thigh_L": ("hip_center_distance", 1.0),
    "UpperArm_R": ("shoulder_center_distance", -1.0),
    "UpperArm_L": ("shoulder_center_distance", 1.0),
}


@dataclass(frozen=True)
class AnthropometryProfile:
    """Subject measurements. Lengths in metres, weight in kg, age in years."""

    gender: Gender | None = None
    age: float | None = None
    height: float | None = None
    weight: float | None = None
    pelvis_width: float | None = None
    hip_center_distance: float | None = None
    shoulder_center_distance: float | None = None
    foot_length: float | None = None
    foot_width: float | None = None
    heel_ankle_offset: float | None = None
    ankle_height: float | None = None

    def require(self, *names: str) -> None:
        """Raise ``MissingAnthropometry`` naming the first absent field."""
        for name in names:
            if getattr(self, name) is None:
                raise ScalingError(
                    "MissingAnthropometry",
                    f"anthropometry is missing {name}",
                    location=name,
                )


@dataclass(frozen=True)
class ScalingRow:
    """One table row.

    Regression rows carry ``length_fraction`` and ``mass_fraction``; linear
    age rows carry ``a`` and ``b`` with ``mass_fraction = a + b * age``.
    """

    segment_type: str
    com_fraction: float
    rgyr: Vec3
    gender: Gender | None = None
    length_fraction: float | None = None
    mass_fraction: float | None = None
    a: float | None = None
    b: float | None = None
    direction: Direction = Direction.DOWN


@dataclass(frozen=True)
class ScalingTable:
    algorithm_id: str
    rows: tuple[ScalingRow, ...]
    linear_age: bool = False

    def row(self, segment_type: str, gender: Gender | None = None) -> ScalingRow | None:
        """Row for a segment type; genderless rows match any gender."""
        for row in self.rows:
            if row.segment_type == segment_type and row.gender in (gender, None):
                return row
        return None

    def segment_types(self, gender: Gender | None = None) -> list[str]:
        """Segment types in file order."""
        seen: dict[str, None] = {}
        for row in self.rows:
            if row.gender in (gender, None):
                seen.setdefault(row.segment_type, None)
        return list(seen)

    def mass_fraction_sum(self, gender: Gender | None = None, age: float = 0.0) -> float:
        total = []
        for segment_type in self.segment_types(gender):
            row = self.row(segment_type, gender)
            assert row is not None
            total.append(_mass_fraction(row, age))
        return math.fsum(total)


@dataclass(frozen=True)
class SegmentDefaults:
    """Scaled properties of one segment type.

    ``com_local`` is measured from the segment origin; ``inertia_local`` is
    about the centre of mass in local axes.
    """

    segment_type: str
    ldefault: float
    mdefault: float
    com_local: Vec3
    inertia_local: Mat3
    com_fraction: float = 0.0
    rgyr: Vec3 = (0.0, 0.0, 0.0)
    direction: Direction = Direction.DOWN

    @property
    def distal(self) -> Vec3:
        """Position of the segment end opposite its origin."""
        u = self.direction.unit
        return (u[0] * self.ldefault, u[1] * self.ldefault, u[2] * self.ldefault)


@dataclass(frozen=True)
class JointOffsets:
    """Anthropometric adjustments for the tree builder.

    Attributes:
        joints: Transverse joint offset per child segment type.
        points: Absolute local position per foot point name.
    """

    joints: dict[str, Vec3] = field(default_factory=dict)
    points: dict[str, Vec3] = field(default_factory=dict)


def segment_defaults(
    segment_type: str,
    length: float,
    mass: float,
    com_fraction: float,
    rgyr: Vec3,
    direction: Direction = Direction.DOWN,
) -> SegmentDefaults:
    """Derive centre of mass and inertia from the gyration parameterization."""
    u = direction.unit
    c = com_fraction * length
    return SegmentDefaults(
        segment_type=segment_type,
        ldefault=length,
        mdefault=mass,
        com_local=(u[0] * c, u[1] * c, u[2] * c),
        inertia_local=diag3(*(mass * (r * length) ** 2 for r in rgyr)),
        com_fraction=com_fraction,
        rgyr=rgyr,
        direction=direction,
    )


def _mass_fraction(row: ScalingRow, age: float) -> float:
    if row.mass_fraction is not None:
        return row.mass_fraction
    return (row.a or 0.0) + (row.b or 0.0) * age


def _rows_for(
    table: ScalingTable, gender: Gender | None, segment_types: Iterable[str] | None
) -> list[ScalingRow]:
    types = table.segment_types(gender) if segment_types is None else segment_types
    rows = []
    for segment_type in types:
        row = table.row(segment_type, gender)
        if row is None:
            raise ScalingError(
                "UnknownSegmentType",
                f"segment type {segment_type!r} is not in scaling table "
                f"{table.algorithm_id!r}",
                location=segment_type,
            )
        rows.append(row)
    return rows


def scale_segments_regression(
    table: ScalingTable,
    profile: AnthropometryProfile,
    segment_types: Iterable[str] | None = None,
) -> list[SegmentDefaults]:
    """Scale segments from height, weight and gender.

    Args:
        table: A regression table (length and mass fractions).
        profile: Subject anthropometry; gender, height and weight are required.
        segment_types: Types to scale, in output order. Defaults to every
            type in the table.

    Returns:
        One ``SegmentDefaults`` per segment type.

    Raises:
        ScalingError: ``MissingAnthropometry`` or ``UnknownSegmentType``.
    """
    if table.linear_age:
        raise ScalingError(
            "UnsupportedAlgorithm",
            f"{table.algorithm_id} needs segment lengths; use scale_segments_child",
        )
    profile.require("gender", "height", "weight")
    assert profile.height is not None and profile.weight is not None

    defaults = []
    for row in _rows_for(table, profile.gender, segment_types):
        length = (row.length_fraction or 0.0) * profile.height
        mass = (row.mass_fraction or 0.0) * profile.weight
        defaults.append(
            segment_defaults(
                row.segment_type, length, mass, row.com_fraction, row.rgyr, row.direction
            )
        )
    logger.debug(
        "Scaled %d segments with %s", len(defaults), table.algorithm_id
    )
    return defaults


def scale_segments_child(
    table: ScalingTable,
    profile: AnthropometryProfile,
    lengths: Mapping[str, float],
    segment_types: Iterable[str] | None = None,
) -> list[SegmentDefaults]:
    """Scale segments with a linear age model; lengths come from the subject.

    Raises:
        ScalingError: ``MissingAnthropometry`` (age or weight absent) or
            ``MissingSegmentLength`` naming the first uncovered type.
    """
    profile.require("age", "weight")
    assert profile.age is not None and profile.weight is not None

    defaults = []
    for row in _rows_for(table, profile.gender, segment_types):
        if row.segment_type not in lengths:
            raise ScalingError(
                "MissingSegmentLength",
                f"no length given for segment type {row.segment_type!r}",
                location=row.segment_type,
            )
        mass = _mass_fraction(row, profile.age) * profile.weight
        defaults.append(
            segment_defaults(
                row.segment_type,
                lengths[row.segment_type],
                mass,
                row.com_fraction,
                row.rgyr,
                row.direction,
            )
        )
    return defaults


def apply_custom_lengths(
    defaults: Sequence[SegmentDefaults], lcustom: Mapping[str, float], M: float
) -> list[SegmentDefaults]:
    """Rescale segment masses to custom lengths while preserving total mass.

    Each mass is scaled by its length ratio and the result is renormalized
    so that the masses sum to ``M``. Segments without a custom length keep
    their default length. Centre of mass and inertia are recomputed from the
    new mass and length.

    Raises:
        ScalingError: ``UnknownSegmentType``, ``NonPositiveLength`` or
            ``ZeroUnadjustedMass``.
    """
    known = {d.segment_type for d in defaults}
    for segment_type, length in lcustom.items():
        if segment_type not in known:
            raise ScalingError(
                "UnknownSegmentType",
                f"custom length given for unknown segment type {segment_type!r}",
                location=segment_type,
            )
        if not length > 0:
            raise ScalingError(
                "NonPositiveLength",
                f"custom length of {segment_type!r} must be positive, got {length}",
                location=segment_type,
            )

    ratios = [lcustom.get(d.segment_type, d.ldefault) / d.ldefault for d in defaults]
    unadjusted = [d.mdefault * r for d, r in zip(defaults, ratios, strict=True)]
    m_unadj = math.fsum(unadjusted)
    if m_unadj == 0.0:
        raise ScalingError(
            "ZeroUnadjustedMass", "all default segment masses are zero"
        )
    factor = M / m_unadj

    return [
        segment_defaults(
            d.segment_type,
            lcustom.get(d.segment_type, d.ldefault),
            m * factor,
            d.com_fraction,
            d.rgyr,
            d.direction,
        )
        for d, m in zip(defaults, unadjusted, strict=True)
    ]


def compute_joint_offsets(
    profile: AnthropometryProfile, defaults: Sequence[SegmentDefaults]
) -> JointOffsets:
    """Transverse joint offsets and anthropometric foot points.

    Hips and shoulders of bilateral (3D) models are offset by half the
    respective centre distance along local Y, right side negative. Sagittal
    models need no transverse measurements. Foot points are produced only
    when foot length, heel-ankle offset and ankle height are all known.

    Raises:
        ScalingError: ``MissingAnthropometry`` when a bilateral model lacks
            the hip or shoulder centre distance.
    """
    types = {d.segment_type for d in defaults}
    joints: dict[str, Vec3] = {}
    for segment_type, (attribute, sign) in _BILATERAL_OFFSETS.items():
        if segment_type not in types:
            continue
        profile.require(attribute)
        half = getattr(profile, attribute) / 2.0
        joints[segment_type] = (0.0, sign * half, 0.0)

    points: dict[str, Vec3] = {}
    if all(
        getattr(profile, name) is not None
        for name in ("foot_length", "heel_ankle_offset", "ankle_height")
    ):
        assert profile.foot_length is not None
        assert profile.heel_ankle_offset is not None
        assert profile.ankle_height is not None
        heel_x = -profile.heel_ankle_offset
        toe_x = profile.foot_length - profile.heel_ankle_offset
        z = -profile.ankle_height
        points["Heel_Sagittal"] = (heel_x, 0.0, z)
        points["Toe_Sagittal"] = (toe_x, 0.0, z)
        if profile.foot_width is not None:
            half = profile.foot_width / 2.0
            for side, medial in (("R", half), ("L", -half)):
                for part, x in (("Heel", heel_x), ("Toe", toe_x)):
                    points[f"{part}_Medial_{side}"] = (x, medial, z)
                    points[f"{part}_Lateral_{side}"] = (x, -medial, z)
    return JointOffsets(joints=joints, points=points)


def load_scaling_table(
    algorithm: str, base_dir: Path | None = None, scaling_dir: Path | None = None
) -> ScalingTable:
    """Load a bundled table by id, or a custom table from a path.

    Args:
        algorithm: Bundled algorithm id or path to a table file.
        base_dir: Directory relative paths are resolved against.
        scaling_dir: Directory holding the bundled tables.

    Raises:
        ScalingError: ``UnknownScalingAlgorithm`` if neither resolves.
    """
    from modelforge.config import get_config
    from modelforge.formats.scaling_table import parse_scaling_table

    scaling_dir = scaling_dir or get_config().scaling_dir
    if algorithm in {a.value for a in AlgorithmId} - {AlgorithmId.CUSTOM}:
        path = scaling_dir / f"{algorithm}.csv"
        algorithm_id = algorithm
    else:
        path = Path(algorithm)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        algorithm_id = AlgorithmId.CUSTOM.value
    if not path.is_file():
        raise ScalingError(
            "UnknownScalingAlgorithm",
            f"{algorithm!r} is neither a bundled scaling algorithm nor a table file",
            location=algorithm,
        )
    logger.info("Loading scaling table %s", path)
    return parse_scaling_table(
        path.read_text(encoding="utf-8"), algorithm_id=algorithm_id, source=str(path)
    )
