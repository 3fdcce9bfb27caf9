"""Tests for kinematic tree construction, markers, loops and combination."""

from pathlib import Path

import numpy as np
import pytest

from modelforge.diagnostics import BuildError, DiagnosticLog
from modelforge.dictionary import (
    LoopConstraintSet,
    LoopRow,
    builtin_dictionary,
    merge_custom_dictionary,
)
from modelforge.formats import (
    MarkerRow,
    MarkerSpec,
    MarkerType,
    parse_anthropometry,
    parse_description,
    parse_dictionary,
    parse_mass_properties,
    parse_marker_file,
    parse_object_setup,
)
from modelforge.kinematics import (
    Functionality,
    LoopConstraint,
    ModelKind,
    add_default_markerset,
    build_human_model,
    build_object_model,
    combine_models,
    loop_set_fits,
    place_markers,
    reference_pose_frames,
    resolve_loop_constraints,
    with_loop_constraints,
)
from modelforge.scaling import (
    load_scaling_table,
    scale_segments_regression,
    segment_defaults,
)

SAMPLES = Path(__file__).parent.parent / "data" / "samples"
SAGITTAL = SAMPLES / "sagittal_human_exo_box"
HUMAN_3D = SAMPLES / "human_3d"

HEIGHT = 1.80
THIGH = 0.242504 * HEIGHT
SHANK = 0.249282 * HEIGHT
PELVIS = 0.083688 * HEIGHT


def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def _human(folder: Path, description: str, algorithm: str, dictionary, anthropometry="anthropometry.txt"):
    profile = parse_anthropometry(_read(folder / anthropometry))
    parsed = parse_description(_read(folder / description))
    table = load_scaling_table(algorithm)
    defaults = scale_segments_regression(table, profile, parsed.segment_types())
    return build_human_model(parsed, dictionary, defaults, profile=profile)


def _defaults(*types: str):
    return [segment_defaults(t, 0.5, 2.0, 0.5, (0.3, 0.3, 0.1)) for t in types]


def _object(description: str, setup: str, policies: str = "", human=None, **kwargs):
    return build_object_model(
        parse_description(description),
        builtin_dictionary(),
        parse_object_setup(setup),
        parse_mass_properties(policies),
        human,
        **kwargs,
    )


@pytest.fixture
def dictionary():
    """Built-in dictionary extended with the exoskeleton entries."""
    return merge_custom_dictionary(
        builtin_dictionary(), parse_dictionary(_read(SAGITTAL / "exo.dict")), DiagnosticLog()
    )


@pytest.fixture
def human(dictionary):
    """Sagittal adult male human."""
    return _human(SAGITTAL, "human_description.txt", "deleva_sagittal", dictionary)


@pytest.fixture
def exo(dictionary, human):
    """Exoskeleton object scaled to the sagittal human."""
    return build_object_model(
        parse_description(_read(SAGITTAL / "exo_description.txt")),
        dictionary,
        parse_object_setup(_read(SAGITTAL / "exo_setup.txt")),
        parse_mass_properties(_read(SAGITTAL / "exo_mass.txt")),
        human,
        name="exo",
        base_dir=SAGITTAL,
    )


@pytest.fixture
def box(dictionary):
    """Wooden box object."""
    return build_object_model(
        parse_description(_read(SAGITTAL / "box_description.txt")),
        dictionary,
        parse_object_setup(_read(SAGITTAL / "box_setup.txt")),
        parse_mass_properties(_read(SAGITTAL / "box_mass.txt")),
        name="box",
        base_dir=SAGITTAL,
    )


class TestHumanModel:
    """Tests for building a human tree from scaled segments."""

    def test_sagittal_tree(self, human):
        """Test segment count, DoF, ids and total mass."""
        assert human.kind == ModelKind.HUMAN
        assert len(human.segments) == 10
        assert human.dof == 12
        assert [s.id for s in human.segments] == list(range(1, 11))
        assert human.segment("Segment_MidTrunk").parent_id == 1
        assert human.segment("Segment_Pelvis").parent_id == 0
        assert human.total_mass == pytest.approx(75.0, rel=1e-9)

    def test_joint_frames(self, human):
        """Test children sit at the parent's distal end and hips at its origin."""
        r = {s.name: s.joint_frame.r for s in human.segments}
        assert r["Segment_Pelvis"] == pytest.approx((0.0, 0.0, 0.0))
        assert r["Segment_MidTrunk"] == pytest.approx((0.0, 0.0, -PELVIS))
        assert r["Segment_Thigh"] == pytest.approx((0.0, 0.0, 0.0))
        assert r["Segment_Shank"] == pytest.approx((0.0, 0.0, -THIGH))
        assert r["Segment_Foot"] == pytest.approx((0.0, 0.0, -SHANK))
        for segment in human.segments:
            assert np.array_equal(segment.joint_frame.E, np.eye(3))

    def test_segments_extend_down(self, human):
        """Test every segment's centre of mass and children lie along -Z."""
        by_name = {s.name: s for s in human.segments}
        for segment in human.segments:
            assert segment.com[:2] == (0.0, 0.0)
            assert segment.com[2] < 0.0
            parent = by_name.get(segment.parent_name)
            if parent is not None and segment.segment_type != "Thigh":
                assert segment.joint_frame.r == pytest.approx((0.0, 0.0, -parent.length))

    def test_body_properties(self, human):
        """Test mass, centre of mass and inertia come from the scaled defaults."""
        thigh = human.segment("Segment_Thigh")
        mass = 0.2832 * 75.0
        assert thigh.length == pytest.approx(THIGH)
        assert thigh.mass == pytest.approx(mass)
        assert thigh.com == pytest.approx((0.0, 0.0, -0.4095 * THIGH))
        assert thigh.inertia[0][0] == pytest.approx(mass * (0.329 * THIGH) ** 2)
        assert thigh.inertia[0][1] == 0.0

    def test_points(self, human):
        """Test dictionary points scale with length and foot points follow anthropometry."""
        thigh = human.segment("Segment_Thigh")
        assert thigh.point("Thigh_Strap") == pytest.approx((0.0, 0.0, -0.5 * THIGH))
        foot = human.segment("Segment_Foot")
        assert foot.point("Heel_Sagittal") == pytest.approx((-0.05, 0.0, -0.08))
        assert foot.point("Toe_Sagittal") == pytest.approx((0.21, 0.0, -0.08))

    def test_constraints(self, human):
        """Test constraint rows resolve to foot points in set order."""
        foot = human.segment("Segment_Foot")
        subsets = [row.subset for row in foot.constraints]
        assert subsets.count("FootFlat_Sagittal") == 3
        assert subsets.count("HeelFixed_Sagittal") == 2
        assert subsets.count("ToeFixed_Sagittal") == 2
        assert foot.constraints[1].point == "Heel_Sagittal"
        assert foot.constraints[1].normal == pytest.approx((0.0, 0.0, 1.0))

    def test_features(self, human):
        """Test the features a human build reports."""
        assert {
            Functionality.ANTHROPOMETRY,
            Functionality.SCALING_ALGORITHMS,
            Functionality.POINTS,
            Functionality.POINT_CONSTRAINTS,
        } <= human.features
        assert Functionality.CUSTOM_SETUPS not in human.features

    def test_geometric_visuals(self, human):
        """Test feet are boxes, the head a sphere and limbs cylinders."""
        foot = human.segment("Segment_Foot")
        assert foot.visual.source == "cuboid"
        assert foot.visual.dimensions == pytest.approx(
            (0.2 * foot.length, 0.4 * foot.length, foot.length)
        )
        assert foot.visual.center == pytest.approx((0.0, 0.0, -foot.length / 2))
        assert human.segment("Segment_Head").visual.source == "sphere"
        thigh = human.segment("Segment_Thigh").visual
        assert thigh.source == "cylinder"
        assert thigh.dimensions[2] == pytest.approx(THIGH)
        assert thigh.center == pytest.approx((0.0, 0.0, -THIGH / 2))

    def test_detailed_meshes_fall_back(self, dictionary):
        """Test detailed meshes are reported and replaced by shapes."""
        log = DiagnosticLog()
        model = build_human_model(
            parse_description("A, Thigh, RY, ROOT\n"),
            dictionary,
            _defaults("Thigh"),
            type_meshes="detailed",
            log=log,
        )
        assert log.codes() == ["DetailedMeshUnavailable"]
        assert model.segment("A").visual.source == "cylinder"

    def test_bilateral_offsets(self):
        """Test hips and shoulders of a 3D model are offset along Y, right negative."""
        model = _human(HUMAN_3D, "description.txt", "deleva_3seg_torso", builtin_dictionary())
        assert len(model.segments) == 16
        assert model.dof == 43
        assert model.segment("Segment_Thigh_R").joint_frame.r == pytest.approx((0.0, -0.085, 0.0))
        assert model.segment("Segment_Thigh_L").joint_frame.r == pytest.approx((0.0, 0.085, 0.0))
        upper_trunk = 0.082133 * 1.68
        assert model.segment("Segment_UpperArm_R").joint_frame.r == pytest.approx(
            (0.0, -0.165, -upper_trunk)
        )
        foot = model.segment("Segment_Foot_R")
        assert foot.point("Heel_Medial_R") == pytest.approx((-0.045, 0.045, -0.07))
        assert foot.point("Toe_Lateral_R") == pytest.approx((0.195, -0.045, -0.07))


class TestTreeErrors:
    """Tests for description errors found while building."""

    def _build(self, text: str, *types: str):
        with pytest.raises(BuildError) as exc:
            build_human_model(
                parse_description(text), builtin_dictionary(), _defaults(*(types or ("T",)))
            )
        return exc.value

    def test_duplicate_segment(self):
        """Test a segment name defined twice."""
        error = self._build("A, T, RY, ROOT\nA, T, RY, ROOT\n")
        assert [(d.code, d.line) for d in error.diagnostics] == [("DuplicateSegmentName", 2)]

    def test_duplicate_segment_type(self):
        """Test two segments sharing one scaled type, and its children, are not built."""
        error = self._build("A, T, RY, ROOT\nB, T, RY, A\nC, T, RY, B\n")
        assert [(d.code, d.line) for d in error.diagnostics] == [("DuplicateSegmentType", 2)]
        assert error.diagnostics[0].location == "B"

    def test_parent_after_child(self):
        """Test a parent listed after its child."""
        error = self._build("B, T, RY, A\nA, T, RY, ROOT\n")
        assert error.code == "DanglingParent"
        assert error.diagnostics[0].location == "B"

    def test_undefined_parent(self):
        """Test a parent that is never defined."""
        assert self._build("A, T, RY, ROOT\nB, T, RY, Nope\n").code == "DanglingParent"

    def test_cycle(self):
        """Test a parent chain that loops is reported once."""
        error = self._build("A, T, RY, B\nB, T, RY, A\n")
        assert [d.code for d in error.diagnostics] == ["CycleDetected"]

    def test_unknown_segment_type(self):
        """Test a segment type missing from the scaled defaults."""
        error = self._build("A, T, RY, ROOT\nB, Wing, RY, A\n")
        assert error.code == "UnknownSegmentType"
        assert error.diagnostics[0].location == "B"

    @pytest.mark.parametrize(
        "text",
        [
            "A, T, Joint_Hinge, ROOT\n",
            "A, T, RY, ROOT, Points_Nope\n",
            "A, T, RY, ROOT, , ConstraintSet_Nope\n",
        ],
    )
    def test_unknown_dictionary_name(self, text):
        """Test unknown joints, point sets and constraint sets."""
        assert self._build(text).code == "UnknownDictionaryName"

    def test_constraint_point_not_attached(self):
        """Test a constraint set whose points are not on the segment."""
        error = self._build("A, T, RY, ROOT, , ConstraintSet_Foot_Sagittal\n")
        assert {d.code for d in error.diagnostics} == {"UnknownDictionaryName"}
        assert len(error.diagnostics) == 7

    def test_errors_are_collected(self):
        """Test every bad line is reported, and reported to the caller's log."""
        log = DiagnosticLog()
        with pytest.raises(BuildError) as exc:
            build_human_model(
                parse_description("A, T, RY, ROOT\nA, T, RY, ROOT\nB, Wing, RY, A\n"),
                builtin_dictionary(),
                _defaults("T"),
                log=log,
            )
        codes = ["DuplicateSegmentName", "UnknownSegmentType"]
        assert [d.code for d in exc.value.diagnostics] == codes
        assert log.codes() == codes


class TestObjectModel:
    """Tests for object trees built from setup files."""

    def test_scale_to_copies_human(self, human, exo):
        """Test scaled segments copy the human length and joint position exactly."""
        for obj, target in (("Exo_Thigh", "Segment_Thigh"), ("Exo_Shank", "Segment_Shank")):
            assert exo.segment(obj).length == human.segment(target).length
            assert exo.segment(obj).joint_frame.r == human.segment(target).joint_frame.r

    def test_mean_density(self, exo):
        """Test a density policy integrates the segment mesh."""
        thigh = exo.segment("Exo_Thigh")
        assert thigh.mass == pytest.approx(2700.0 * 0.04 * 0.02 * THIGH, rel=1e-9)
        assert thigh.com == pytest.approx((0.0, 0.0, -THIGH / 2), abs=1e-12)
        assert thigh.visual.dimensions == pytest.approx((0.04, 0.02, THIGH))

    def test_user_values(self, exo):
        """Test user mass values pass through."""
        pelvis = exo.segment("Exo_Pelvis")
        assert pelvis.mass == 1.5
        assert pelvis.com == pytest.approx((0.0, 0.0, 0.05))
        assert np.allclose(pelvis.inertia, np.diag([0.01, 0.008, 0.006]))
        assert pelvis.visual.center == pytest.approx((0.0, 0.0, 0.05))

    def test_features(self, exo):
        """Test the features an object build reports."""
        assert {
            Functionality.CUSTOM_SETUPS,
            Functionality.MASS_FROM_MESH,
            Functionality.MASS_FROM_USER,
            Functionality.POINTS,
        } <= exo.features
        assert exo.kind == ModelKind.OBJECT

    def test_box(self, box):
        """Test a centred cube of wood."""
        segment = box.segment("Box")
        assert segment.mass == pytest.approx(300.0 * 0.027)
        assert segment.com == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)
        assert segment.inertia[0][0] == pytest.approx(8.1 * 0.18 / 12.0)

    def test_child_defaults_to_parent_end(self):
        """Test an unscaled child joint sits at the parent's end along -Z."""
        model = _object("Bar, Bar, RY, ROOT\nTip, Tip, RY, Bar\n", "Bar, length, 0.4\nTip, length, 0.1\n")
        assert model.segment("Tip").joint_frame.r == (0.0, 0.0, -0.4)

    def test_rotation_and_offset(self):
        """Test setup rotations give E as the transposed world rotation."""
        model = _object(
            "Base, Base, RY, ROOT\nLid, Lid, RY, Base\n",
            "Base, rotation, 0, 0, 90\nLid, joint_offset, 1, 0, 0\n",
        )
        E = np.asarray(model.segment("Base").joint_frame.E)
        assert np.allclose(E, [[0, 1, 0], [-1, 0, 0], [0, 0, 1]], atol=1e-12)
        frames = reference_pose_frames(model)
        assert np.allclose(frames["Lid"][1], (0.0, 1.0, 0.0), atol=1e-12)

    def test_no_mass_policy(self):
        """Test a segment without any mass information is massless with a warning."""
        log = DiagnosticLog()
        model = _object("Bar, Bar, RY, ROOT\n", "Bar, length, 0.4\n", log=log)
        assert model.segment("Bar").mass == 0.0
        assert log.codes() == ["NoMassPolicy"]

    def test_setup_user_values(self):
        """Test mass values in the setup apply when no policy is given."""
        model = _object("Bar, Bar, RY, ROOT\n", "Bar, mass, 2.0\nBar, com, 0, 0, -0.2\n")
        assert model.segment("Bar").mass == 2.0
        assert model.segment("Bar").com == pytest.approx((0.0, 0.0, -0.2))
        assert Functionality.MASS_FROM_USER in model.features

    def test_missing_human(self):
        """Test scale_to without a human model."""
        with pytest.raises(BuildError) as exc:
            _object("Bar, Bar, RY, ROOT\n", "Bar, scale_to, Segment_Thigh\n")
        assert exc.value.code == "MissingHumanContext"

    def test_scale_to_unknown_segment(self, human):
        """Test scale_to naming a segment the human does not have."""
        with pytest.raises(BuildError) as exc:
            _object("Bar, Bar, RY, ROOT\n", "Bar, scale_to, Segment_Wing\n", human=human)
        assert exc.value.code == "MissingHumanContext"

    def test_unknown_mass_policy_target(self):
        """Test a mass policy naming no segment."""
        with pytest.raises(BuildError) as exc:
            _object("Bar, Bar, RY, ROOT\n", "Bar, length, 0.4\n", "Nope, UseMeanDensity, 100\n")
        assert exc.value.code == "UnknownMassPolicy"

    def test_unknown_mesh(self, tmp_path):
        """Test a mesh file that cannot be found."""
        with pytest.raises(BuildError) as exc:
            _object(
                "Bar, Bar, RY, ROOT\n",
                "Bar, length, 0.4\nBar, mesh, missing.obj, 1, 1, 1\n",
                base_dir=tmp_path,
            )
        assert exc.value.code == "UnknownMeshRef"

    def test_density_without_mesh(self):
        """Test a density policy on a segment without a mesh."""
        with pytest.raises(BuildError) as exc:
            _object("Bar, Bar, RY, ROOT\n", "Bar, length, 0.4\n", "Bar, UseMeanDensity, 100\n")
        assert exc.value.code == "MissingMesh"
        assert exc.value.diagnostics[0].line == 1

    def test_mesh_dimension_count(self):
        """Test a cylinder given three dimensions."""
        with pytest.raises(BuildError) as exc:
            _object("Bar, Bar, RY, ROOT\n", "Bar, length, 0.4\nBar, mesh, cylinder, 1, 1, 1\n")
        assert exc.value.code == "InvalidDimensions"


class TestMarkers:
    """Tests for custom and default markers."""

    def test_cluster_placement(self, human):
        """Test a cluster is laid out and translated by the segment length."""
        spec = parse_marker_file(_read(SAGITTAL / "markers.txt"))
        shank_rows = tuple(r for r in spec.rows if r.segment == "Segment_Shank")
        model = place_markers(human, MarkerSpec(shank_rows))
        markers = dict(model.segment("Segment_Shank").markers)
        origin = np.array([0.0, -0.06 * SHANK, -0.5 * SHANK])
        assert markers["SHK1"] == pytest.approx(tuple(origin))
        assert markers["SHK2"] == pytest.approx(tuple(origin + [0.05, 0.0, 0.0]))
        assert markers["SHK3"] == pytest.approx(tuple(origin + [0.0, 0.0, 0.05]))
        assert Functionality.CUSTOM_MARKERS in model.features

    def test_rotated_cluster(self, human):
        """Test the cluster offsets are rotated by the row angles."""
        row = MarkerRow("Segment_Thigh", MarkerType.CLUSTER, 0.1, ("A", "B", "C"), rotation=(0.0, 0.0, 90.0))
        markers = dict(place_markers(human, MarkerSpec((row,))).segment("Segment_Thigh").markers)
        assert np.allclose(markers["B"], (0.0, 0.1, 0.0), atol=1e-12)
        assert np.allclose(markers["C"], (0.0, 0.0, 0.1), atol=1e-12)

    def test_double_cluster(self, human):
        """Test a double cluster stacks a second cluster along Y."""
        names = tuple("ABCDEF")
        row = MarkerRow("Segment_Thigh", MarkerType.DOUBLE_CLUSTER, 0.1, names)
        markers = dict(place_markers(human, MarkerSpec((row,))).segment("Segment_Thigh").markers)
        assert list(markers) == list(names)
        assert markers["E"] == pytest.approx((0.1, 0.1, 0.0))

    @pytest.mark.parametrize(
        ("row", "code"),
        [
            (MarkerRow("Segment_Wing", MarkerType.MARKER, 0.0, ("A",)), "UnknownSegment"),
            (MarkerRow("Segment_Thigh", MarkerType.CLUSTER, 0.1, ("A",)), "NameCountMismatch"),
            (MarkerRow("Segment_Thigh", MarkerType.CLUSTER, 0.0, ("A", "A", "B")), "DuplicateMarkerName"),
        ],
    )
    def test_errors(self, human, row, code):
        """Test marker rows that cannot be placed."""
        with pytest.raises(BuildError) as exc:
            place_markers(human, MarkerSpec((row,)))
        assert exc.value.code == code

    def test_default_markerset(self, human):
        """Test unsided fallbacks attach and missing segment types are skipped."""
        log = DiagnosticLog()
        model = add_default_markerset(human, log)
        assert len(model.marker_names()) == 26
        assert len(log.warnings) == 13
        assert set(log.codes()) == {"MarkerSegmentSkipped"}
        markers = dict(model.segment("Segment_Thigh").markers)
        assert markers["RTHI"] == pytest.approx((0.0, -0.3 * THIGH, -0.5 * THIGH))

    def test_default_markerset_duplicate(self, human):
        """Test a default marker clashing with a custom one is skipped."""
        row = MarkerRow("Segment_Head", MarkerType.MARKER, 0.0, ("LFHD",))
        model = place_markers(human, MarkerSpec((row,)))
        log = DiagnosticLog()
        model = add_default_markerset(model, log)
        assert model.marker_names().count("LFHD") == 1
        assert "DuplicateMarkerName" in log.codes()


class TestLoopsAndCombination:
    """Tests for loop constraints and combined models."""

    def test_loop_spans_models(self, dictionary, human, exo, box):
        """Test the strap loop only fits the combined tree."""
        loop_set = dictionary.loop_sets["LoopSet_Exo_Thigh"]
        assert not loop_set_fits(loop_set, human)
        assert not loop_set_fits(loop_set, exo)
        combined = combine_models(human, [exo, box])
        assert loop_set_fits(loop_set, combined)

        loops = resolve_loop_constraints(loop_set, combined)
        assert len(loops) == 1
        assert loops[0].predecessor_position == pytest.approx((0.0, 0.0, -0.5 * THIGH))
        assert loops[0].successor_position == loops[0].predecessor_position
        assert tuple(loops[0].axis) == (0, 0, 0, 1, 0, 1)
        assert with_loop_constraints(combined, loops).loop_constraints == loops

    def test_loop_unknown_point(self, human, exo):
        """Test a loop row naming a point the body does not carry."""
        loop_set = LoopConstraintSet(
            "Bad",
            (LoopRow(("Segment_Thigh", "Nope"), ("Exo_Thigh", "Exo_Thigh_Cuff"), (0, 0, 0, 1, 0, 1)),),
        )
        with pytest.raises(BuildError) as exc:
            resolve_loop_constraints(loop_set, combine_models(human, [exo]))
        assert exc.value.code == "InvalidLoopConstraint"

    def test_combined_order(self, human, exo, box):
        """Test human segments come first and object ids are shifted."""
        combined = combine_models(human, [exo, box])
        assert combined.kind == ModelKind.COMBINED
        assert len(combined.segments) == 14
        assert [s.id for s in combined.segments] == list(range(1, 15))
        assert combined.segment("Exo_Thigh").parent_id == 11
        assert combined.segment("Box").parent_id == 0
        assert combined.total_mass == pytest.approx(human.total_mass + exo.total_mass + box.total_mass)
        assert combined.dof == human.dof + exo.dof + box.dof

    def test_name_collisions(self, human, box):
        """Test colliding object names are prefixed with the object index."""
        row = MarkerRow("Box", MarkerType.MARKER, 0.0, ("BOX1",))
        marked = place_markers(box, MarkerSpec((row,)))
        log = DiagnosticLog()
        combined = combine_models(human, [marked, marked], log)
        assert [s.name for s in combined.segments[-2:]] == ["Box", "Object2_Box"]
        assert combined.segment("Object2_Box").markers[0][0] == "Object2_BOX1"
        assert log.codes() == ["NameCollision", "NameCollision"]

    def test_object_loops_follow_renames(self, human, exo):
        """Test an object's loop rows name the renamed bodies and points."""
        cuff = exo.segment("Exo_Thigh").point("Exo_Thigh_Cuff")
        loop = LoopConstraint(
            "Cuff",
            "Exo_Thigh",
            "Exo_Thigh_Cuff",
            cuff,
            "Exo_Shank",
            "Exo_Knee",
            (0.0, 0.0, 0.0),
            (0, 0, 0, 1, 0, 1),
        )
        looped = with_loop_constraints(exo, [loop])
        combined = combine_models(human, [looped, looped])
        first, second = combined.loop_constraints
        assert first == loop
        assert second.predecessor_body == "Object2_Exo_Thigh"
        assert second.predecessor_point == "Object2_Exo_Thigh_Cuff"
        assert second.successor_body == "Object2_Exo_Shank"
        assert second.successor_point == "Exo_Knee"
        assert combined.segment("Object2_Exo_Thigh").point("Object2_Exo_Thigh_Cuff") == cuff

    def test_reference_pose(self, human):
        """Test world frames with all joints at zero."""
        frames = reference_pose_frames(human)
        R, t = frames["Segment_Foot"]
        assert np.allclose(R, np.eye(3))
        assert t == pytest.approx((0.0, 0.0, -(THIGH + SHANK)))
        head = -(0.083688 + 0.123779 + 0.098047) * HEIGHT
        assert frames["Segment_Head"][1] == pytest.approx((0.0, 0.0, head))
        assert np.array_equal(frames["ROOT"][1], np.zeros(3))
