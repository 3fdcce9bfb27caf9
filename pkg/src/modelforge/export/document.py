"""Export document: the serializable form of a model.

The Lua writer renders this document and the JSON mirror dumps it, so both
outputs carry exactly the same structure.
"""

from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from modelforge.diagnostics import DiagnosticLog, ParseError
from modelforge.kinematics import ConstraintRow, KinematicModel, ModelSegment
from modelforge.spatial import IDENTITY3
from modelforge.validation import ensure_valid

Vector = list[float]
Matrix = list[list[float]]


class _Document(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class JointFrameDoc(_Document):
    """Joint position ``r`` in the parent frame and parent-to-child rotation ``E``."""

    r: Vector
    E: Matrix


class BodyDoc(_Document):
    mass: float
    com: Vector
    inertia: Matrix


class VisualDoc(_Document):
    src: str
    dimensions: Vector
    mesh_center: Vector


class FrameDoc(_Document):
    name: str
    parent: str
    joint: list[list[int]]
    joint_frame: JointFrameDoc
    body: BodyDoc
    markers: dict[str, Vector] | None = None
    visuals: list[VisualDoc] | None = None
    custom_joint: str | None = None


class PointDoc(_Document):
    name: str
    body: str
    point: Vector


class ContactRowDoc(_Document):
    constraint_type: Literal["contact"] = "contact"
    body: str
    point: Vector
    normal: Vector
    name: str


class LoopRowDoc(_Document):
    constraint_type: Literal["loop"] = "loop"
    predecessor_body: str
    successor_body: str
    predecessor_transform: JointFrameDoc
    successor_transform: JointFrameDoc
    axis: list[int]
    name: str


ConstraintRowDoc = Annotated[
    ContactRowDoc | LoopRowDoc, Field(discriminator="constraint_type")
]


class ProvenanceDoc(_Document):
    file: str
    sha256: str


class ModelDocument(_Document):
    """Everything the exporters write for one model."""

    name: str
    kind: str
    gravity: Vector
    frames: list[FrameDoc]
    points: list[PointDoc] = Field(default_factory=list)
    constraint_sets: dict[str, list[ConstraintRowDoc]] = Field(default_factory=dict)
    provenance: list[ProvenanceDoc] = Field(default_factory=list)

    @property
    def dof(self) -> int:
        return sum(len(f.joint) for f in self.frames)

    @property
    def total_mass(self) -> float:
        return sum(f.body.mass for f in self.frames)

    def frame(self, name: str) -> FrameDoc | None:
        return next((f for f in self.frames if f.name == name), None)


def _matrix(m: tuple[tuple[float, ...], ...]) -> Matrix:
    return [list(row) for row in m]


def _frame(segment: ModelSegment) -> FrameDoc:
    visual = segment.visual
    return FrameDoc(
        name=segment.name,
        parent=segment.parent_name,
        joint=[list(row) for row in segment.joint.rows],
        joint_frame=JointFrameDoc(
            r=list(segment.joint_frame.r), E=_matrix(segment.joint_frame.E)
        ),
        body=BodyDoc(
            mass=segment.mass, com=list(segment.com), inertia=_matrix(segment.inertia)
        ),
        markers={n: list(p) for n, p in segment.markers} or None,
        visuals=[
            VisualDoc(
                src=visual.source,
                dimensions=list(visual.dimensions),
                mesh_center=list(visual.center),
            )
        ]
        if visual
        else None,
        custom_joint=segment.joint.custom_payload,
    )


def _contact(segment: ModelSegment, row: ConstraintRow) -> ContactRowDoc:
    position = segment.point(row.point)
    assert position is not None
    return ContactRowDoc(
        body=segment.name, point=list(position), normal=list(row.normal), name=row.point
    )


def build_document(model: KinematicModel) -> ModelDocument:
    """Convert a model into its export document.

    Contact subsets appear in order of first use, followed by loop sets.
    """
    constraint_sets: dict[str, list[ConstraintRowDoc]] = {}
    for segment in model.segments:
        for row in segment.constraints:
            constraint_sets.setdefault(row.subset, []).append(_contact(segment, row))
    for loop in model.loop_constraints:
        constraint_sets.setdefault(loop.name, []).append(
            LoopRowDoc(
                predecessor_body=loop.predecessor_body,
                successor_body=loop.successor_body,
                predecessor_transform=JointFrameDoc(
                    r=list(loop.predecessor_position), E=_matrix(IDENTITY3)
                ),
                successor_transform=JointFrameDoc(
                    r=list(loop.successor_position), E=_matrix(IDENTITY3)
                ),
                axis=list(loop.axis),
                name=f"{loop.predecessor_point}-{loop.successor_point}",
            )
        )

    return ModelDocument(
        name=model.name,
        kind=model.kind.value,
        gravity=list(model.gravity),
        frames=[_frame(s) for s in model.segments],
        points=[
            PointDoc(name=n, body=s.name, point=list(p))
            for s in model.segments
            for n, p in s.points
        ],
        constraint_sets=constraint_sets,
        provenance=[ProvenanceDoc(file=f, sha256=d) for f, d in model.provenance],
    )


def write_json(model: KinematicModel) -> str:
    """JSON mirror of the Lua model.

    Raises:
        ExportError: ``ValidationFailed`` when the model has validation errors.
    """
    ensure_valid(model)
    return build_document(model).model_dump_json(indent=2) + "\n"


def load_document(text: str, source: str = "<json>") -> ModelDocument:
    """Parse an exported JSON model.

    Raises:
        ParseError: ``InvalidDocument`` listing the schema violations.
    """
    try:
        return ModelDocument.model_validate_json(text)
    except ValidationError as e:
        log = DiagnosticLog(source)
        for error in e.errors():
            where = ".".join(str(part) for part in error["loc"]) or "document"
            log.error("InvalidDocument", f"{where}: {error['msg']}", location=where)
        log.raise_if_errors(ParseError)
        raise
