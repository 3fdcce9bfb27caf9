"""Parsers and serializers for every input file format."""

from modelforge.formats.anthropometry import parse_anthropometry, serialize_anthropometry
from modelforge.formats.description import (
    DescriptionLine,
    ModelDescription,
    parse_description,
    serialize_description,
)
from modelforge.formats.dictionary_file import parse_dictionary, serialize_dictionary
from modelforge.formats.environment import (
    Environment,
    HumanInputs,
    ObjectInputs,
    parse_environment,
    serialize_environment,
)
from modelforge.formats.lengths import parse_segment_lengths, serialize_segment_lengths
from modelforge.formats.markers import (
    MarkerRow,
    MarkerSpec,
    MarkerType,
    parse_marker_file,
    serialize_marker_file,
)
from modelforge.formats.mass_properties import (
    MassPolicy,
    MassPolicyKind,
    parse_mass_properties,
    serialize_mass_properties,
)
from modelforge.formats.scaling_table import parse_scaling_table, serialize_scaling_table
from modelforge.formats.setup import (
    ObjectSetup,
    SetupEntry,
    parse_object_setup,
    serialize_object_setup,
)

__all__ = [
    "DescriptionLine",
    "Environment",
    "HumanInputs",
    "MarkerRow",
    "MarkerSpec",
    "MarkerType",
    "MassPolicy",
    "MassPolicyKind",
    "ModelDescription",
    "ObjectInputs",
    "ObjectSetup",
    "SetupEntry",
    "parse_anthropometry",
    "parse_description",
    "parse_dictionary",
    "parse_environment",
    "parse_marker_file",
    "parse_mass_properties",
    "parse_object_setup",
    "parse_scaling_table",
    "parse_segment_lengths",
    "serialize_anthropometry",
    "serialize_description",
    "serialize_dictionary",
    "serialize_environment",
    "serialize_marker_file",
    "serialize_mass_properties",
    "serialize_object_setup",
    "serialize_scaling_table",
    "serialize_segment_lengths",
]
