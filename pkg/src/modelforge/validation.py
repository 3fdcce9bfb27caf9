"""Structural and physical checks on a built model before export."""

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from modelforge.diagnostics import Diagnostic, DiagnosticLog, ExportError
from modelforge.formats.description import ROOT
from modelforge.kinematics import CAPABILITIES, KinematicModel, ModelKind
from modelforge.spatial import is_finite

logger = logging.getLogger(__name__)

INERTIA_TOLERANCE = 1e-9


@dataclass
class ValidationReport:
    model: str
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(d.is_error for d in self.diagnostics)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]

    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


def _check_capabilities(model: KinematicModel, log: DiagnosticLog) -> None:
    if model.kind == ModelKind.COMBINED:
        return
    for feature in sorted(model.features):
        if model.kind not in CAPABILITIES[feature]:
            log.error(
                "CapabilityViolation",
                f"{feature.value} is not available for {model.kind.value} models",
                location=feature.value,
            )


def _check_topology(model: KinematicModel, log: DiagnosticLog) -> None:
    ids = {ROOT: 0}
    for index, segment in enumerate(model.segments, start=1):
        if segment.id != index:
            log.error(
                "TopologicalOrder",
                f"segment {segment.name} has id {segment.id}, expected {index}",
                location=segment.name,
            )
        parent_id = ids.get(segment.parent_name)
        if parent_id is None or parent_id != segment.parent_id:
            log.error(
                "TopologicalOrder",
                f"parent {segment.parent_name} of {segment.name} does not precede it",
                location=segment.name,
            )
        ids.setdefault(segment.name, segment.id)


def _check_unique(model: KinematicModel, log: DiagnosticLog) -> None:
    groups = {
        "DuplicateSegmentName": [s.name for s in model.segments],
        "DuplicatePointName": model.point_names(),
        "DuplicateMarkerName": model.marker_names(),
    }
    for code, names in groups.items():
        for name, count in Counter(names).items():
            if count > 1:
                log.error(code, f"{name!r} appears {count} times", location=name)


def _check_bodies(model: KinematicModel, log: DiagnosticLog) -> None:
    for s in model.segments:
        values = [s.mass, *s.com, *np.ravel(s.inertia), *s.joint_frame.r]
        if not is_finite(values) or not is_finite(s.joint_frame.E):
            log.error(
                "NonFiniteValue", f"{s.name} has non-finite values", location=s.name
            )
            continue
        if s.mass < 0:
            log.error("NegativeMass", f"{s.name} has mass {s.mass}", location=s.name)
        inertia = np.asarray(s.inertia)
        scale = max(float(np.abs(inertia).max()), 1.0)
        if np.abs(inertia - inertia.T).max() > INERTIA_TOLERANCE * scale:
            log.error(
                "InvalidInertia", f"{s.name} inertia is not symmetric", location=s.name
            )
        elif np.linalg.eigvalsh(inertia).min() < -INERTIA_TOLERANCE * scale:
            log.error(
                "InvalidInertia",
                f"{s.name} inertia is not positive semi-definite",
                location=s.name,
            )

        names = {n for n, _ in s.points}
        for row in s.constraints:
            if row.point not in names:
                log.error(
                    "UnresolvedConstraintPoint",
                    f"constraint {row.subset} uses point {row.point} "
                    f"not attached to {s.name}",
                    location=s.name,
                )


def _check_loops(model: KinematicModel, log: DiagnosticLog) -> None:
    for loop in model.loop_constraints:
        if loop.predecessor_body == loop.successor_body:
            log.error(
                "InvalidLoopConstraint",
                f"loop {loop.name} joins {loop.predecessor_body} to itself",
                location=loop.name,
            )
        for body, point in (
            (loop.predecessor_body, loop.predecessor_point),
            (loop.successor_body, loop.successor_point),
        ):
            segment = model.segment(body)
            if segment is None or segment.point(point) is None:
                log.error(
                    "InvalidLoopConstraint",
                    f"loop {loop.name}: {point} on {body} is not in the model",
                    location=loop.name,
                )


def validate_model(model: KinematicModel) -> ValidationReport:
    """Check capability rows, topological order, uniqueness and physics.

    Never raises; the report carries every finding.
    """
    log = DiagnosticLog()
    _check_capabilities(model, log)
    _check_topology(model, log)
    _check_unique(model, log)
    _check_bodies(model, log)
    _check_loops(model, log)
    report = ValidationReport(model.name, list(log))
    logger.debug(
        "Validated %s: %d error(s)", model.name, len(report.errors)
    )
    return report


def ensure_valid(model: KinematicModel) -> None:
    """Raise ``ValidationFailed`` carrying every validation error."""
    report = validate_model(model)
    if not report.ok:
        raise ExportError(
            "ValidationFailed",
            f"model {model.name} failed validation with {len(report.errors)} error(s)",
            diagnostics=report.errors,
        )
