"""Tests for the input file parsers."""

from pathlib import Path

import pytest

from modelforge.diagnostics import DiagnosticLog, ParseError
from modelforge.formats import (
    MarkerType,
    MassPolicyKind,
    parse_anthropometry,
    parse_description,
    parse_environment,
    parse_marker_file,
    parse_mass_properties,
    parse_object_setup,
    parse_scaling_table,
    parse_segment_lengths,
    serialize_anthropometry,
    serialize_description,
    serialize_environment,
    serialize_marker_file,
    serialize_mass_properties,
    serialize_object_setup,
    serialize_scaling_table,
    serialize_segment_lengths,
)
from modelforge.formats.common import format_number, iter_lines, parse_number
from modelforge.scaling import AlgorithmId, Direction, Gender, load_scaling_table

SAMPLES = Path(__file__).parent.parent / "data" / "samples"


class TestCommon:
    """Tests for the shared line tokenizer."""

    def test_comments_and_blank_lines(self):
        """Test comments are stripped and line numbers are physical."""
        lines = list(iter_lines("% header\n\na, b % trailing\r\n  \nc\n"))
        assert [(line.number, line.fields) for line in lines] == [
            (3, ("a", "b")),
            (5, ("c",)),
        ]

    def test_byte_order_mark(self):
        """Test a leading BOM is ignored."""
        assert next(iter_lines("\ufeffgender, male")).fields == ("gender", "male")

    @pytest.mark.parametrize("raw", ["1e999", "-1e999", "nan", "inf", "0x10"])
    def test_rejects_non_finite(self, raw):
        """Test overflowing and non-decimal literals are not numbers."""
        log = DiagnosticLog()
        assert parse_number(raw, log, 7, "height") is None
        assert [(d.code, d.line) for d in log] == [("NonNumericValue", 7)]

    def test_overflow_in_file(self):
        """Test an overflowing length is reported at its line."""
        with pytest.raises(ParseError) as exc:
            parse_segment_lengths("0.4, Segment_Thigh\n1e999, Segment_Shank\n")
        assert [(d.code, d.line) for d in exc.value.diagnostics] == [("NonNumericValue", 2)]

    def test_format_number(self):
        """Test numbers format to their shortest exact form."""
        assert format_number(0.1) == "0.1"
        assert float(format_number(1 / 3)) == 1 / 3


class TestAnthropometry:
    """Tests for anthropometry files."""

    def test_parse(self):
        """Test keywords are case-insensitive."""
        profile = parse_anthropometry(
            "Gender, Female\nAGE, 30\nheight, 1.7\nweight, 60\nfootLength, 0.25\n"
        )
        assert profile.gender == Gender.FEMALE
        assert profile.age == 30
        assert profile.height == 1.7
        assert profile.foot_length == 0.25
        assert profile.pelvis_width is None

    def test_serialize_reparses(self):
        """Test the serialized profile parses back unchanged."""
        profile = parse_anthropometry("gender, male\nheight, 1.8\nweight, 75\n")
        assert parse_anthropometry(serialize_anthropometry(profile)) == profile

    def test_errors(self):
        """Test every bad line is reported."""
        with pytest.raises(ParseError) as exc:
            parse_anthropometry(
                "gender, other\nheight, tall\nweight, -1\nshoe, 42\nheight, 1.8\n"
            )
        assert [d.code for d in exc.value.diagnostics] == [
            "InvalidGender",
            "NonNumericValue",
            "NegativeLength",
            "UnknownKeyword",
        ]

    def test_zero_age_allowed(self):
        """Test a newborn has age zero."""
        assert parse_anthropometry("age, 0\n").age == 0


class TestDescription:
    """Tests for model description files."""

    def test_optional_sets(self):
        """Test point and constraint sets are optional."""
        description = parse_description(
            "Segment_Pelvis, Pelvis, Joint_Root2D_TXTZRY, ROOT\n"
            "Segment_Foot, Foot, RY, Segment_Pelvis, Points_Foot_Sagittal, "
            "ConstraintSet_Foot_Sagittal\n"
            "Segment_Toes, Foot, RY, Segment_Foot, , \n"
        )
        pelvis, foot, toes = description.lines
        assert pelvis.point_set is None
        assert foot.point_set == "Points_Foot_Sagittal"
        assert foot.constraint_set == "ConstraintSet_Foot_Sagittal"
        assert toes.point_set is None
        assert description.segment_types() == ["Pelvis", "Foot"]
        assert description.type_of("Segment_Foot") == "Foot"

    def test_errors(self):
        """Test field counts and empty names."""
        with pytest.raises(ParseError) as exc:
            parse_description("a, b, c\n, Pelvis, RY, ROOT\n")
        assert [(d.code, d.line) for d in exc.value.diagnostics] == [
            ("WrongFieldCount", 1),
            ("EmptyName", 2),
        ]

    def test_serialize_reparses(self):
        """Test a serialized description parses back unchanged."""
        description = parse_description(
            (SAMPLES / "human_3d" / "description.txt").read_text()
        )
        assert parse_description(serialize_description(description)) == description


class TestEnvironment:
    """Tests for environment files."""

    def test_sample(self):
        """Test the sagittal sample environment."""
        env = parse_environment(
            (SAMPLES / "sagittal_human_exo_box" / "environment.txt").read_text()
        )
        assert env.human.scaling_algorithm == "deleva_sagittal"
        assert env.human.add_markers is True
        assert [o.index for o in env.objects] == [1, 2]
        assert env.objects[0].mass_properties == "exo_mass.txt"
        assert env.loop_sets == ("LoopSet_Exo_Thigh",)
        assert env.combined_save == "combined.lua"
        assert env.gravity == (0.0, 0.0, -9.81)

    def test_paths(self, tmp_path):
        """Test inputs resolve against the file and outputs against the folder."""
        env = parse_environment(
            "humanModel_Anthropometry, a.txt\n"
            "humanModel_Description, d.txt\n"
            "humanModel_ScalingAlgorithm, deleva_sagittal\n"
            "OutputFolder, out\n",
            base_dir=tmp_path,
        )
        assert env.resolve("a.txt") == tmp_path / "a.txt"
        assert env.output_path("h.lua") == tmp_path / "out" / "h.lua"

    def test_gravity(self):
        """Test an explicit gravity vector."""
        env = parse_environment(
            "humanModel_Anthropometry, a\nhumanModel_Description, d\n"
            "humanModel_ScalingAlgorithm, s\nGravity, 0, -9.81, 0\n"
        )
        assert env.gravity == (0.0, -9.81, 0.0)

    def test_unknown_keyword_warns(self):
        """Test unknown keywords are warnings, not errors."""
        log = DiagnosticLog()
        parse_environment(
            "humanModel_Anthropometry, a\nhumanModel_Description, d\n"
            "humanModel_ScalingAlgorithm, s\nhumanModel_Colour, red\n",
            log=log,
        )
        assert log.codes() == ["UnknownKeyword"]
        assert not log.has_errors

    def test_errors(self):
        """Test missing, duplicate and gapped keywords."""
        with pytest.raises(ParseError) as exc:
            parse_environment(
                "humanModel_Anthropometry, a\n"
                "humanModel_anthropometry, b\n"
                "humanModel_TypeMeshes, wireframe\n"
                "objectModel_Description_2, box.txt\n"
                "objectModel_Setup_2, box_setup.txt\n"
            )
        codes = [d.code for d in exc.value.diagnostics]
        assert codes == [
            "DuplicateKeyword",
            "InvalidValue",
            "MissingMandatory",
            "MissingMandatory",
            "GappedObjectIndex",
        ]

    def test_zero_padded_object_index(self):
        """Test a zero-padded object index repeats the unpadded keyword."""
        with pytest.raises(ParseError) as exc:
            parse_environment(
                "humanModel_Anthropometry, a\nhumanModel_Description, d\n"
                "humanModel_ScalingAlgorithm, s\n"
                "objectModel_Description_1, box.txt\n"
                "objectModel_Setup_1, box_setup.txt\n"
                "objectModel_Description_01, other.txt\n"
            )
        assert [(d.code, d.line) for d in exc.value.diagnostics] == [("DuplicateKeyword", 6)]
        assert exc.value.diagnostics[0].location == "objectModel_Description_01"

    def test_object_needs_setup(self):
        """Test an object without a setup file."""
        with pytest.raises(ParseError) as exc:
            parse_environment(
                "humanModel_Anthropometry, a\nhumanModel_Description, d\n"
                "humanModel_ScalingAlgorithm, s\nobjectModel_Description_1, box\n"
            )
        assert exc.value.diagnostics[0].location == "objectModel_Setup_1"

    def test_serialize_reparses(self):
        """Test a serialized environment parses back unchanged."""
        env = parse_environment(
            (SAMPLES / "sagittal_human_exo_box" / "environment.txt").read_text()
        )
        assert parse_environment(serialize_environment(env)) == env


class TestSegmentLengths:
    """Tests for custom segment length files."""

    def test_parse(self):
        """Test lengths keep file order."""
        lengths = parse_segment_lengths("0.4, Segment_Thigh\n0.41, Segment_Shank\n")
        assert list(lengths.items()) == [("Segment_Thigh", 0.4), ("Segment_Shank", 0.41)]

    def test_non_positive(self):
        """Test a zero length is rejected."""
        with pytest.raises(ParseError) as exc:
            parse_segment_lengths("0, Segment_Thigh\n")
        assert exc.value.code == "NegativeLength"
        assert exc.value.diagnostics[0].location == "Segment_Thigh"

    def test_serialize_reparses(self):
        """Test serialized lengths parse back in the same order."""
        lengths = {"Segment_Thigh_R": 0.395, "Segment_Shank_R": 0.41, "Segment_Foot_R": 0.27}
        again = parse_segment_lengths(serialize_segment_lengths(lengths))
        assert list(again.items()) == list(lengths.items())

    def test_error_lines(self):
        """Test every bad line is reported at its physical line number."""
        with pytest.raises(ParseError) as exc:
            parse_segment_lengths(
                "% measured\n"
                "0.4, Segment_Thigh\n"
                "-1, Segment_Shank\n"
                "0.3\n"
                "0.4, Segment_Thigh\n"
                "abc, Segment_Foot\n"
            )
        assert [(d.code, d.line) for d in exc.value.diagnostics] == [
            ("NegativeLength", 3),
            ("WrongFieldCount", 4),
            ("DuplicateEntry", 5),
            ("NonNumericValue", 6),
        ]


class TestMassProperties:
    """Tests for object mass-property files."""

    def test_sample(self):
        """Test both policies in the sample exoskeleton file."""
        policies = parse_mass_properties(
            (SAMPLES / "sagittal_human_exo_box" / "exo_mass.txt").read_text()
        )
        pelvis = policies["Exo_Pelvis"]
        assert pelvis.kind == MassPolicyKind.USE_USER_VALUES
        assert pelvis.mass == 1.5
        assert pelvis.com == (0.0, 0.0, 0.05)
        assert pelvis.inertia[1][1] == 0.008
        assert policies["Exo_Thigh"].density == 2700

    def test_errors(self):
        """Test bad policies, field counts and negative values."""
        with pytest.raises(ParseError) as exc:
            parse_mass_properties(
                "A, UseVolume, 1\nB, UseMeanDensity, 1, 2\nC, UseMeanDensity, -5\n"
            )
        assert [d.code for d in exc.value.diagnostics] == [
            "UnknownMassPolicy",
            "WrongFieldCount",
            "NegativeValue",
        ]

    def test_serialize_reparses(self):
        """Test both policies survive a serialize and parse."""
        policies = parse_mass_properties(
            "Exo_Thigh, UseMeanDensity, 2700\n"
            "Box, UseUserValues, 2, 0, 0, 0.1, 0.01, 0, 0, 0, 0.02, 0, 0, 0, 0.03\n"
        )
        again = parse_mass_properties(serialize_mass_properties(policies))
        assert again == policies
        assert again["Box"].inertia == ((0.01, 0.0, 0.0), (0.0, 0.02, 0.0), (0.0, 0.0, 0.03))

    def test_error_lines(self):
        """Test errors carry the physical line number and segment."""
        with pytest.raises(ParseError) as exc:
            parse_mass_properties(
                "A, UseMeanDensity, 1\n\nB, UseUserValues, 1\nC, UseMeanDensity, x\n"
            )
        found = [(d.code, d.line) for d in exc.value.diagnostics]
        assert found == [("WrongFieldCount", 3), ("NonNumericValue", 4)]
        assert exc.value.diagnostics[0].location == "B"


class TestObjectSetup:
    """Tests for object setup files."""

    def test_sample(self):
        """Test scale_to and the length token in mesh dimensions."""
        setup = parse_object_setup(
            (SAMPLES / "sagittal_human_exo_box" / "exo_setup.txt").read_text()
        )
        pelvis = setup.get("ExoPelvis")
        assert pelvis.length == 0.1
        assert pelvis.mesh_source == "cuboid"
        assert pelvis.mesh_dims == (0.12, 0.32, 0.1)
        assert pelvis.mesh_center == (0.0, 0.0, 0.05)
        thigh = setup.get("ExoThigh")
        assert thigh.scale_to == "Segment_Thigh"
        assert thigh.mesh_dims == (0.04, 0.02, "length")
        assert setup.get("Unlisted").length is None

    def test_serialize_reparses(self):
        """Test a serialized setup parses back unchanged."""
        setup = parse_object_setup(
            "Box, length, 0.3\nBox, rotation, 0, 0, 90\nBox, mesh, sphere, 0.1\n"
            "Box, mass, 2\nBox, com, 0, 0, 0\n"
            "Box, inertia, 1, 0, 0, 0, 1, 0, 0, 0, 1\n"
        )
        assert parse_object_setup(serialize_object_setup(setup)) == setup

    def test_errors(self):
        """Test unknown properties and duplicates."""
        with pytest.raises(ParseError) as exc:
            parse_object_setup(
                "Box, colour, red\nBox, length, 1\nBox, length, 2\nBox, com, 1, 2\n"
            )
        assert [d.code for d in exc.value.diagnostics] == [
            "UnknownKeyword",
            "DuplicateEntry",
            "WrongFieldCount",
        ]


class TestMarkerFile:
    """Tests for custom marker files."""

    def test_sample(self):
        """Test marker and cluster entries in the sample."""
        spec = parse_marker_file(
            (SAMPLES / "sagittal_human_exo_box" / "markers.txt").read_text()
        )
        cluster = spec.rows[0]
        assert cluster.marker_type == MarkerType.CLUSTER
        assert cluster.names == ("SHK1", "SHK2", "SHK3")
        assert cluster.distance == 0.05
        assert cluster.translation == (0.0, -0.06, -0.5)
        assert [row.segment for row in spec.rows] == ["Segment_Shank", "Exo_Thigh", "Box"]

    def test_serialize_reparses(self):
        """Test a serialized marker file parses back unchanged."""
        spec = parse_marker_file(
            "Segment_Thigh, DoubleCluster, 0.04\n"
            "A, B, C, D, E, F, 0, 0.1, -0.5, 0, 0, 90\n"
        )
        assert parse_marker_file(serialize_marker_file(spec)) == spec

    def test_name_count(self):
        """Test a cluster with too few names."""
        with pytest.raises(ParseError) as exc:
            parse_marker_file("Seg, Cluster, 0.05\nA, B, , , , , 0, 0, 0, 0, 0, 0\n")
        assert exc.value.code == "NameCountMismatch"

    def test_missing_data_line(self):
        """Test a header without its data line."""
        with pytest.raises(ParseError) as exc:
            parse_marker_file("Seg, Marker, 0\n")
        assert exc.value.code == "WrongFieldCount"


class TestScalingTable:
    """Tests for scaling table files."""

    def test_regression(self):
        """Test the regression header with a direction column."""
        table = parse_scaling_table(
            "segment_type,gender,length_fraction,mass_fraction,com_fraction,"
            "rgyr_x,rgyr_y,rgyr_z,direction\n"
            "Head,male,0.13,0.07,0.5,0.3,0.3,0.27,up\n"
        )
        assert not table.linear_age
        row = table.row("Head", Gender.MALE)
        assert row is not None
        assert row.direction == Direction.UP
        assert table.row("Head", Gender.FEMALE) is None

    def test_linear_age(self):
        """Test the linear age header allows a negative slope."""
        table = parse_scaling_table(
            "segment_type,a,b,com_fraction,rgyr_x,rgyr_y,rgyr_z\n"
            "Head,0.2,-0.005,0.5,0.3,0.3,0.27\n"
        )
        assert table.linear_age
        assert table.rows[0].b == -0.005

    def test_bad_header(self):
        """Test an unrecognised header."""
        with pytest.raises(ParseError) as exc:
            parse_scaling_table("type,length\nHead,0.13\n")
        assert exc.value.code == "MalformedHeader"

    @pytest.mark.parametrize(
        "algorithm", [a.value for a in AlgorithmId if a != AlgorithmId.CUSTOM]
    )
    def test_bundled_serialize_reparses(self, algorithm):
        """Test every bundled table survives a serialize and parse."""
        table = load_scaling_table(algorithm)
        text = serialize_scaling_table(table)
        assert "direction" not in text.splitlines()[0]
        assert parse_scaling_table(text, algorithm_id=algorithm) == table

    def test_direction_serialize_reparses(self):
        """Test a custom direction is written back as its own column."""
        table = parse_scaling_table(
            "segment_type,a,b,com_fraction,rgyr_x,rgyr_y,rgyr_z,direction\n"
            "Head,0.2,-0.005,0.5,0.3,0.3,0.27,up\n"
            "Trunk,0.4,0.001,0.45,0.3,0.3,0.2,down\n"
        )
        text = serialize_scaling_table(table)
        assert text.splitlines()[0].endswith(",direction")
        assert parse_scaling_table(text) == table

    def test_error_lines(self):
        """Test row errors are reported at their physical line numbers."""
        with pytest.raises(ParseError) as exc:
            parse_scaling_table(
                "segment_type,gender,length_fraction,mass_fraction,com_fraction,"
                "rgyr_x,rgyr_y,rgyr_z\n"
                "Head,male,0.13,0.07,0.5,0.3,0.3,0.27\n"
                "Head,other,0.13,0.07,0.5,0.3,0.3,0.27\n"
                "Trunk,female,0.3,-0.4,0.5,0.3,0.3,0.3\n"
                "Head,male,0.13,0.07,0.5,0.3,0.3,0.27\n"
                "Foot,male,0.04\n"
            )
        assert [(d.code, d.line) for d in exc.value.diagnostics] == [
            ("InvalidGender", 3),
            ("NegativeValue", 4),
            ("DuplicateEntry", 5),
            ("WrongFieldCount", 6),
        ]
