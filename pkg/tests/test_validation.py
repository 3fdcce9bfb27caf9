"""Tests for pre-export model validation."""

from dataclasses import replace

import pytest

from modelforge.diagnostics import ExportError
from modelforge.dictionary import LoopConstraintSet, LoopRow, builtin_dictionary
from modelforge.formats import parse_description, parse_object_setup
from modelforge.kinematics import (
    ConstraintRow,
    Functionality,
    KinematicModel,
    ModelKind,
    build_object_model,
    combine_models,
    resolve_loop_constraints,
    with_loop_constraints,
)
from modelforge.validation import ensure_valid, validate_model


@pytest.fixture
def model() -> KinematicModel:
    """Two-segment object with user masses and one point."""
    dictionary = builtin_dictionary()
    return build_object_model(
        parse_description("A, A, RY, ROOT\nB, B, RY, A, Points_Foot_Sagittal\n"),
        dictionary,
        parse_object_setup("A, length, 0.5\nA, mass, 1.0\nB, length, 0.2\nB, mass, 2.0\n"),
    )


def _with_segment(model: KinematicModel, index: int, **changes) -> KinematicModel:
    segments = list(model.segments)
    segments[index] = replace(segments[index], **changes)
    return replace(model, segments=tuple(segments))


def test_valid_model(model):
    """Test a freshly built model passes."""
    report = validate_model(model)
    assert report.ok
    assert report.codes() == []
    ensure_valid(model)


@pytest.mark.parametrize(
    ("kind", "feature"),
    [
        (ModelKind.OBJECT, Functionality.ANTHROPOMETRY),
        (ModelKind.OBJECT, Functionality.SCALING_ALGORITHMS),
        (ModelKind.OBJECT, Functionality.CUSTOM_SCALING),
        (ModelKind.HUMAN, Functionality.CUSTOM_SETUPS),
        (ModelKind.HUMAN, Functionality.MASS_FROM_MESH),
        (ModelKind.HUMAN, Functionality.MASS_FROM_USER),
    ],
)
def test_capability_violation(model, kind, feature):
    """Test features outside a model kind's capability row."""
    subject = replace(model, kind=kind, features=frozenset({feature}))
    report = validate_model(subject)
    assert report.codes() == ["CapabilityViolation"]
    assert report.errors[0].location == feature.value


def test_combined_skips_capabilities(model):
    """Test combined models may mix human and object features."""
    subject = replace(
        model,
        kind=ModelKind.COMBINED,
        features=frozenset({Functionality.ANTHROPOMETRY, Functionality.CUSTOM_SETUPS}),
    )
    assert validate_model(subject).ok


def test_topological_order(model):
    """Test a child listed before its parent."""
    subject = replace(model, segments=tuple(reversed(model.segments)))
    assert "TopologicalOrder" in validate_model(subject).codes()


def test_duplicate_names(model):
    """Test repeated segment and marker names."""
    subject = _with_segment(model, 1, name="A", markers=(("M", (0.0, 0.0, 0.0)),) * 2)
    codes = validate_model(subject).codes()
    assert "DuplicateSegmentName" in codes
    assert "DuplicateMarkerName" in codes


@pytest.mark.parametrize(
    ("changes", "code"),
    [
        ({"mass": -1.0}, "NegativeMass"),
        ({"mass": float("nan")}, "NonFiniteValue"),
        ({"com": (0.0, float("inf"), 0.0)}, "NonFiniteValue"),
        ({"inertia": ((1.0, 0.5, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))}, "InvalidInertia"),
        ({"inertia": ((1.0, 0.0, 0.0), (0.0, -1.0, 0.0), (0.0, 0.0, 1.0))}, "InvalidInertia"),
        ({"constraints": (ConstraintRow("Flat", "Nope", (0.0, 0.0, 1.0)),)}, "UnresolvedConstraintPoint"),
    ],
)
def test_body_checks(model, changes, code):
    """Test physically invalid bodies."""
    report = validate_model(_with_segment(model, 1, **changes))
    assert report.codes() == [code]
    assert report.errors[0].location == "B"


def test_loop_checks(model):
    """Test loops on one body and loops to missing points."""
    other = replace(model, name="other")
    combined = combine_models(model, [other])
    loop_set = LoopConstraintSet(
        "Strap", (LoopRow(("B", "Heel_Sagittal"), ("Object1_B", "Object1_Heel_Sagittal"), (0, 0, 0, 1, 0, 1)),)
    )
    loops = resolve_loop_constraints(loop_set, combined)
    assert validate_model(with_loop_constraints(combined, loops)).ok

    same_body = replace(loops[0], successor_body="B", successor_point="Toe_Sagittal")
    missing = replace(loops[0], successor_point="Nope")
    report = validate_model(with_loop_constraints(combined, [same_body, missing]))
    assert report.codes() == ["InvalidLoopConstraint", "InvalidLoopConstraint"]


def test_ensure_valid_raises(model):
    """Test every validation error travels with the exception."""
    subject = _with_segment(model, 1, mass=-1.0, com=(0.0, 0.0, float("nan")))
    subject = _with_segment(subject, 0, mass=-2.0)
    with pytest.raises(ExportError) as exc:
        ensure_valid(subject)
    assert exc.value.code == "ValidationFailed"
    assert [d.code for d in exc.value.diagnostics] == ["NegativeMass", "NonFiniteValue"]
