"""Static preview scene: all segment visuals posed at the reference pose."""

import logging
from pathlib import Path

import numpy as np

from modelforge.kinematics import KinematicModel, reference_pose_frames
from modelforge.mesh import serialize_mesh, visual_mesh
from modelforge.validation import ensure_valid

logger = logging.getLogger(__name__)


def _annotation(kind: str, name: str, position: np.ndarray) -> str:
    x, y, z = (repr(float(c)) for c in position)
    return f"# {kind} {name} {x} {y} {z}"


def write_preview_scene(model: KinematicModel, base_dir: Path | None = None) -> str:
    """One Wavefront scene with an ``o`` group per visual segment.

    Marker and point world positions follow each group as ``#`` comments.

    Raises:
        ExportError: ``ValidationFailed`` when the model has validation errors.
        MeshError: when a segment mesh file cannot be loaded.
    """
    ensure_valid(model)
    frames = reference_pose_frames(model)
    parts = [f"# {model.name} preview scene at the reference pose"]
    vertex_count = 0

    for segment in model.segments:
        R, t = frames[segment.name]
        lines = []
        if segment.visual is not None:
            mesh = visual_mesh(segment.visual, base_dir=base_dir).transformed(R, t)
            lines.append(f"o {segment.name}")
            lines.append(serialize_mesh(mesh, vertex_count).rstrip("\n"))
            vertex_count += len(mesh.vertices)
        for kind, entries in (("marker", segment.markers), ("point", segment.points)):
            for name, position in entries:
                lines.append(_annotation(kind, name, R @ np.asarray(position) + t))
        if lines:
            parts.extend(line for line in lines if line)

    logger.debug("Preview scene for %s: %d vertices", model.name, vertex_count)
    return "\n".join(parts) + "\n"
