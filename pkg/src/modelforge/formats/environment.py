"""Environment files: ``keyword, value`` lines naming every input and output.

One environment describes one human model and any number of objects,
numbered ``objectModel_<Keyword>_1``, ``_2``, ... without gaps. Relative
paths are resolved against the directory of the environment file.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path

from modelforge.diagnostics import DiagnosticLog
from modelforge.formats.common import format_number, iter_lines, parse_flag, parse_numbers
from modelforge.spatial import Vec3, as_vec3

DEFAULT_GRAVITY: Vec3 = (0.0, 0.0, -9.81)
TYPE_MESHES = ("geometric", "detailed")

HUMAN_KEYWORDS = {
    "humanModel_Anthropometry": "anthropometry",
    "humanModel_Description": "description",
    "humanModel_ScalingAlgorithm": "scaling_algorithm",
    "humanModel_CustomSegmentLengths": "custom_lengths",
    "humanModel_TypeMeshes": "type_meshes",
    "humanModel_AddMarkers": "add_markers",
    "humanModel_Save": "save",
}
HUMAN_MANDATORY = (
    "humanModel_Anthropometry",
    "humanModel_Description",
    "humanModel_ScalingAlgorithm",
)
OBJECT_KEYWORDS = {
    "Description": "description",
    "Setup": "setup",
    "MassProperties": "mass_properties",
    "Save": "save",
}
GENERAL_KEYWORDS = {
    "UseCustomMarkers": "custom_markers",
    "combinedModel_Save": "combined_save",
    "OutputFolder": "output_folder",
    "CustomDictionary": "custom_dictionary",
    "UseLoopConstraints": "loop_sets",
    "Gravity": "gravity",
}
# Recognised so that validation can reject them for the wrong model kind
HUMAN_REJECTED_KEYWORDS = ("humanModel_Setup", "humanModel_MassProperties")
OBJECT_REJECTED_KEYWORDS = ("Anthropometry", "ScalingAlgorithm", "CustomSegmentLengths")

_OBJECT_KEYWORD = re.compile(r"^objectModel_([A-Za-z]+)_(\d+)$", re.IGNORECASE)
_MULTI_VALUE = {"gravity", "loop_sets"}


@dataclass(frozen=True)
class HumanInputs:
    anthropometry: str
    description: str
    scaling_algorithm: str
    custom_lengths: str | None = None
    type_meshes: str = "geometric"
    add_markers: bool = False
    save: str | None = None
    setup: str | None = None
    mass_properties: str | None = None


@dataclass(frozen=True)
class ObjectInputs:
    index: int
    description: str
    setup: str
    mass_properties: str | None = None
    save: str | None = None
    anthropometry: str | None = None
    scaling_algorithm: str | None = None
    custom_lengths: str | None = None


@dataclass(frozen=True)
class Environment:
    human: HumanInputs
    objects: tuple[ObjectInputs, ...] = ()
    custom_markers: str | None = None
    combined_save: str | None = None
    output_folder: str = "."
    custom_dictionary: str | None = None
    loop_sets: tuple[str, ...] = ()
    gravity: Vec3 = DEFAULT_GRAVITY
    base_dir: Path = field(default=Path("."), compare=False)
    source: str | None = field(default=None, compare=False)

    def resolve(self, path: str) -> Path:
        """Resolve an input path against the environment file directory."""
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def output_dir(self) -> Path:
        return self.resolve(self.output_folder)

    def output_path(self, path: str) -> Path:
        """Resolve an output path inside the output folder unless absolute."""
        p = Path(path)
        return p if p.is_absolute() else self.output_dir / p


def _canonical(keywords: dict[str, str]) -> dict[str, str]:
    return {k.lower(): k for k in keywords}


_HUMAN_LOOKUP = _canonical(HUMAN_KEYWORDS)
_GENERAL_LOOKUP = _canonical(GENERAL_KEYWORDS)
_HUMAN_REJECTED = {k.lower(): k for k in HUMAN_REJECTED_KEYWORDS}
_OBJECT_LOOKUP = {
    k.lower(): k for k in (*OBJECT_KEYWORDS, *OBJECT_REJECTED_KEYWORDS)
}
_OBJECT_ATTRIBUTES = {
    **OBJECT_KEYWORDS,
    "Anthropometry": "anthropometry",
    "ScalingAlgorithm": "scaling_algorithm",
    "CustomSegmentLengths": "custom_lengths",
}


def parse_environment(
    text: str,
    source: str = "<environment>",
    base_dir: Path | None = None,
    log: DiagnosticLog | None = None,
) -> Environment:
    """Parse an environment file.

    Unknown keywords are warnings; everything else listed below is an error.

    Args:
        text: File contents.
        source: Name used in diagnostics.
        base_dir: Directory relative paths are resolved against.
        log: Receives warnings (and errors) found in the file.

    Raises:
        ParseError: ``DuplicateKeyword``, ``MissingMandatory``,
            ``GappedObjectIndex``, ``WrongFieldCount``, ``InvalidValue``,
            ``InvalidFlag`` or ``NonNumericValue``.
    """
    file_log = DiagnosticLog(source)
    seen: dict[str, int] = {}
    human: dict[str, object] = {}
    general: dict[str, object] = {}
    objects: dict[int, dict[str, object]] = {}
    object_lines: dict[int, int] = {}

    for line in iter_lines(text):
        fields = line.trimmed()
        keyword = fields[0]
        key = keyword.lower()
        match = _OBJECT_KEYWORD.match(keyword)
        if match:
            # objectModel_Save_01 and objectModel_Save_1 name the same object
            key = f"objectmodel_{match.group(1).lower()}_{int(match.group(2))}"
        if key in seen:
            file_log.error(
                "DuplicateKeyword",
                f"{keyword} already given on line {seen[key]}",
                line=line.number,
                location=keyword,
            )
            continue
        seen[key] = line.number

        if key in _HUMAN_LOOKUP:
            target, attribute = human, HUMAN_KEYWORDS[_HUMAN_LOOKUP[key]]
        elif key in _HUMAN_REJECTED:
            target = human
            attribute = "setup" if key.endswith("setup") else "mass_properties"
        elif key in _GENERAL_LOOKUP:
            target, attribute = general, GENERAL_KEYWORDS[_GENERAL_LOOKUP[key]]
        elif match:
            name = _OBJECT_LOOKUP.get(match.group(1).lower())
            if name is None:
                file_log.warning(
                    "UnknownKeyword", f"unknown keyword {keyword!r}", line=line.number
                )
                continue
            index = int(match.group(2))
            target = objects.setdefault(index, {})
            object_lines.setdefault(index, line.number)
            attribute = _OBJECT_ATTRIBUTES[name]
        else:
            file_log.warning(
                "UnknownKeyword", f"unknown keyword {keyword!r}", line=line.number
            )
            continue

        values = fields[1:]
        if attribute not in _MULTI_VALUE and len(values) != 1:
            file_log.error(
                "WrongFieldCount",
                f"{keyword} takes one value, got {len(values)}",
                line=line.number,
            )
            continue
        value = _parse_value(attribute, keyword, values, line.number, file_log)
        if value is not None:
            target[attribute] = value

    for keyword in HUMAN_MANDATORY:
        if HUMAN_KEYWORDS[keyword] not in human and keyword.lower() not in seen:
            file_log.error(
                "MissingMandatory", f"{keyword} is required", location=keyword
            )

    expected = 1
    for index in sorted(objects):
        if index != expected:
            file_log.error(
                "GappedObjectIndex",
                f"object {index} given but object {expected} is missing",
                line=object_lines[index],
            )
            break
        expected += 1
    for index in sorted(objects):
        for required in ("Description", "Setup"):
            if OBJECT_KEYWORDS[required] not in objects[index]:
                file_log.error(
                    "MissingMandatory",
                    f"objectModel_{required}_{index} is required",
                    location=f"objectModel_{required}_{index}",
                )

    if log is not None:
        log.extend(file_log)
    file_log.raise_if_errors()

    return Environment(
        human=HumanInputs(**human),  # type: ignore[arg-type]
        objects=tuple(
            ObjectInputs(index=i, **objects[i])  # type: ignore[arg-type]
            for i in sorted(objects)
        ),
        base_dir=base_dir or Path("."),
        source=source,
        **general,  # type: ignore[arg-type]
    )


def _parse_value(
    attribute: str,
    keyword: str,
    values: tuple[str, ...],
    line: int,
    log: DiagnosticLog,
) -> object | None:
    if attribute == "gravity":
        numbers = parse_numbers(values, log, line, keyword)
        if numbers is None:
            return None
        if len(numbers) != 3:
            log.error(
                "WrongFieldCount", f"{keyword} takes 3 numbers", line=line
            )
            return None
        return as_vec3(numbers)
    if attribute == "loop_sets":
        names = tuple(v for v in values if v)
        if not names:
            log.error("WrongFieldCount", f"{keyword} names no loop sets", line=line)
            return None
        return names

    value = values[0]
    if not value:
        log.error("InvalidValue", f"{keyword} is empty", line=line)
        return None
    if attribute == "add_markers":
        return parse_flag(value, log, line, keyword)
    if attribute == "type_meshes":
        if value.lower() not in TYPE_MESHES:
            log.error(
                "InvalidValue",
                f"{keyword} must be geometric or detailed, got {value!r}",
                line=line,
            )
            return None
        return value.lower()
    return value


def serialize_environment(env: Environment) -> str:
    lines = []
    human_by_attribute = {v: k for k, v in HUMAN_KEYWORDS.items()}
    human_by_attribute |= {
        "setup": "humanModel_Setup",
        "mass_properties": "humanModel_MassProperties",
    }
    for attribute, keyword in human_by_attribute.items():
        value = getattr(env.human, attribute)
        if value is None:
            continue
        if attribute == "add_markers":
            value = "true" if value else "false"
        lines.append(f"{keyword}, {value}")

    for obj in env.objects:
        for name, attribute in _OBJECT_ATTRIBUTES.items():
            value = getattr(obj, attribute)
            if value is not None:
                lines.append(f"objectModel_{name}_{obj.index}, {value}")

    for keyword, attribute in GENERAL_KEYWORDS.items():
        value = getattr(env, attribute)
        if attribute == "gravity":
            value = ", ".join(format_number(g) for g in value)
        elif attribute == "loop_sets":
            if not value:
                continue
            value = ", ".join(value)
        elif value is None:
            continue
        lines.append(f"{keyword}, {value}")
    return "\n".join(lines) + "\n"
