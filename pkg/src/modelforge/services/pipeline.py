"""Model creation orchestration: environment in, validated models and files out."""

import hashlib
import logging
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field, replace
from enum import StrEnum
from pathlib import Path

from modelforge.config import Config
from modelforge.diagnostics import (
    DiagnosticLog,
    DictionaryError,
    ModelForgeError,
    ParseError,
)
from modelforge.dictionary import (
    Dictionary,
    LoopConstraintSet,
    builtin_dictionary,
    load_custom_dictionaries,
)
from modelforge.export import (
    save_text,
    write_json,
    write_lua_model,
    write_preview_scene,
)
from modelforge.formats import (
    Environment,
    MarkerRow,
    MarkerSpec,
    MassPolicyKind,
    ModelDescription,
    parse_anthropometry,
    parse_description,
    parse_environment,
    parse_marker_file,
    parse_mass_properties,
    parse_object_setup,
    parse_segment_lengths,
)
from modelforge.kinematics import (
    Functionality,
    KinematicModel,
    add_default_markerset,
    build_human_model,
    build_object_model,
    combine_models,
    load_default_markerset,
    loop_set_fits,
    place_markers,
    resolve_loop_constraints,
    with_loop_constraints,
)
from modelforge.scaling import (
    apply_custom_lengths,
    compute_joint_offsets,
    load_scaling_table,
    scale_segments_child,
    scale_segments_regression,
)
from modelforge.validation import ValidationReport, validate_model

logger = logging.getLogger(__name__)

# Type alias for progress callback
ProgressCallback = Callable[[str, float], None]


class OutputFormat(StrEnum):
    LUA = "lua"
    JSON = "json"
    SCENE = "scene"


_SUFFIXES = {
    OutputFormat.LUA: ".lua",
    OutputFormat.JSON: ".json",
    OutputFormat.SCENE: ".obj",
}


@dataclass
class CreationResult:
    """Everything one run produced, including its diagnostics."""

    environment: Environment | None = None
    human: KinematicModel | None = None
    objects: list[KinematicModel] = field(default_factory=list)
    combined: KinematicModel | None = None
    reports: list[ValidationReport] = field(default_factory=list)
    log: DiagnosticLog = field(default_factory=DiagnosticLog)
    outputs: list[Path] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.log.has_errors

    def models(self) -> list[KinematicModel]:
        models = [self.human] if self.human else []
        models += self.objects
        if self.combined:
            models.append(self.combined)
        return models


class _Inputs:
    """Reads input files and remembers their digests."""

    def __init__(self, base_dir: Path):
        self.base_dir = base_dir
        self.digests: dict[str, str] = {}

    def label(self, path: Path) -> str:
        try:
            return path.resolve().relative_to(self.base_dir.resolve()).as_posix()
        except ValueError:
            return path.name

    def read(self, path: Path) -> str:
        if not path.is_file():
            raise ParseError(
                "MissingFile", f"input file not found: {path}", file=str(path)
            )
        data = path.read_bytes()
        self.digests[self.label(path)] = hashlib.sha256(data).hexdigest()
        return data.decode("utf-8")

    def provenance(self, labels: Iterable[str]) -> tuple[tuple[str, str], ...]:
        return tuple(
            (label, self.digests[label]) for label in labels if label in self.digests
        )


class ModelCreationService:
    """Runs the creation procedure for one environment file.

    The human model is always built first; objects follow in index order and
    may copy lengths from the human.
    """

    def __init__(self, config: Config, progress: ProgressCallback | None = None):
        """Initialize the service.

        Args:
            config: Application configuration.
            progress: Called with a phase name and a completion fraction.
        """
        self._config = config
        self._progress = progress or (lambda phase, fraction: None)

    def build(self, env_path: Path) -> CreationResult:
        """Parse, build and validate every model of an environment.

        Never raises for input problems; they end up in ``result.log``.
        """
        result = CreationResult(log=DiagnosticLog(str(env_path)))
        try:
            self._build(env_path, result)
        except ModelForgeError as e:
            result.log.extend(e.diagnostics)
        if result.ok:
            self._progress("validation", 0.9)
            for model in result.models():
                report = validate_model(model)
                result.reports.append(report)
                result.log.extend(report.diagnostics)
        return result

    def create(
        self,
        env_path: Path,
        *,
        formats: Sequence[OutputFormat] = (OutputFormat.LUA,),
        force: bool = False,
        dry_run: bool = False,
    ) -> CreationResult:
        """Build, validate and write every requested output.

        Nothing is written when any error was found, when ``dry_run`` is set,
        or when an output already exists and ``force`` is not set.
        """
        result = self.build(env_path)
        if not result.ok or dry_run:
            return result

        self._progress("export", 0.95)
        try:
            targets = self._targets(result, formats)
            if not force:
                existing = [path for path, _, _ in targets if path.exists()]
                for path in existing:
                    result.log.error(
                        "OutputExists",
                        f"{path} already exists; use --force to overwrite",
                        file=str(path),
                    )
                if existing:
                    return result
            for path, model, fmt in targets:
                result.outputs.append(
                    save_text(path, self._render(model, fmt, result), force=True)
                )
        except ModelForgeError as e:
            result.log.extend(e.diagnostics)
        self._progress("done", 1.0)
        return result

    def _render(
        self, model: KinematicModel, fmt: OutputFormat, result: CreationResult
    ) -> str:
        if fmt == OutputFormat.JSON:
            return write_json(model)
        if fmt == OutputFormat.SCENE:
            assert result.environment is not None
            return write_preview_scene(model, base_dir=result.environment.base_dir)
        return write_lua_model(model)

    def _targets(
        self, result: CreationResult, formats: Sequence[OutputFormat]
    ) -> list[tuple[Path, KinematicModel, OutputFormat]]:
        env = result.environment
        assert env is not None
        saves: list[tuple[str, KinematicModel]] = []
        if env.human.save and result.human:
            saves.append((env.human.save, result.human))
        for inputs, model in zip(env.objects, result.objects, strict=True):
            if inputs.save:
                saves.append((inputs.save, model))
        if env.combined_save and result.combined:
            saves.append((env.combined_save, result.combined))
        if not saves:
            result.log.warning(
                "NoOutputRequested",
                "the environment names no humanModel_Save, objectModel_Save_k "
                "or combinedModel_Save output",
            )

        targets = []
        for save, model in saves:
            path = env.output_path(save)
            for fmt in formats:
                suffix = _SUFFIXES[fmt]
                keep = fmt == OutputFormat.LUA and path.suffix
                target = path if keep else path.with_suffix(suffix)
                targets.append((target, model, fmt))
        return targets

    def _build(self, env_path: Path, result: CreationResult) -> None:
        log = result.log
        self._progress("environment", 0.0)
        inputs = _Inputs(env_path.parent)
        env = parse_environment(
            inputs.read(env_path),
            source=str(env_path),
            base_dir=env_path.parent,
            log=log,
        )
        result.environment = env
        env_label = inputs.label(env_path)

        self._progress("dictionary", 0.1)
        dictionary = builtin_dictionary(self._config.dictionary_path)
        if env.custom_dictionary:
            manifest = env.resolve(env.custom_dictionary)
            inputs.read(manifest)
            dictionary = load_custom_dictionaries(manifest, dictionary, log)
        log.raise_if_errors()

        self._progress("human", 0.2)
        human = self._build_human(env, dictionary, inputs, log)

        self._progress("objects", 0.5)
        objects = []
        for obj in env.objects:
            model = self._build_object(env, obj.index, dictionary, human, inputs, log)
            objects.append(model)

        if env.custom_markers:
            markers = parse_marker_file(
                inputs.read(env.resolve(env.custom_markers)),
                source=env.custom_markers,
                log=log,
            )
            human, objects = self._place_markers(markers, human, objects, log)

        self._progress("loops", 0.8)
        human, objects, deferred = self._apply_loops(env, dictionary, human, objects)

        result.human = human
        result.objects = objects
        if env.combined_save or deferred:
            combined = combine_models(human, objects, log)
            for loop_set in deferred:
                combined = with_loop_constraints(
                    combined, resolve_loop_constraints(loop_set, combined)
                )
            if not env.combined_save:
                log.error(
                    "InvalidLoopConstraint",
                    "loop sets spanning several models need combinedModel_Save",
                    location=", ".join(s.name for s in deferred),
                )
            result.combined = combined

        # every model carries the environment digest first
        for attribute in ("human", "combined"):
            model = getattr(result, attribute)
            if model is not None:
                model = self._with_env_digest(model, env_label, inputs)
                setattr(result, attribute, model)
        result.objects = [self._with_env_digest(o, env_label, inputs) for o in objects]

    @staticmethod
    def _with_env_digest(
        model: KinematicModel, env_label: str, inputs: _Inputs
    ) -> KinematicModel:
        provenance = inputs.provenance([env_label]) + tuple(
            p for p in model.provenance if p[0] != env_label
        )
        return replace(model, provenance=provenance)

    def _build_human(
        self,
        env: Environment,
        dictionary: Dictionary,
        inputs: _Inputs,
        log: DiagnosticLog,
    ) -> KinematicModel:
        given = env.human
        read: list[str] = []

        def load(path: str) -> str:
            resolved = env.resolve(path)
            read.append(inputs.label(resolved))
            return inputs.read(resolved)

        profile = parse_anthropometry(load(given.anthropometry), given.anthropometry, log)
        description = parse_description(load(given.description), given.description, log)
        table = load_scaling_table(
            given.scaling_algorithm,
            base_dir=env.base_dir,
            scaling_dir=self._config.scaling_dir,
        )
        lengths = None
        if given.custom_lengths:
            raw = parse_segment_lengths(
                load(given.custom_lengths), given.custom_lengths, log
            )
            lengths = _lengths_by_type(raw, description)

        types = description.segment_types()
        if table.linear_age:
            defaults = scale_segments_child(table, profile, lengths or {}, types)
        else:
            defaults = scale_segments_regression(table, profile, types)
            if lengths:
                assert profile.weight is not None
                defaults = apply_custom_lengths(defaults, lengths, profile.weight)

        model = build_human_model(
            description,
            dictionary,
            defaults,
            compute_joint_offsets(profile, defaults),
            profile,
            type_meshes=given.type_meshes,
            name=_model_name(given.save, "human"),
            log=log,
        )

        features = []
        if lengths and not table.linear_age:
            features.append(Functionality.CUSTOM_SCALING)
        if given.setup:
            features.append(Functionality.CUSTOM_SETUPS)
        if given.mass_properties:
            policies = parse_mass_properties(
                load(given.mass_properties), given.mass_properties, log
            )
            features += [_mass_feature(p.kind) for p in policies.values()]
        model = model.with_features(*features)

        if given.add_markers:
            markerset = load_default_markerset(self._config.markerset_path)
            model = add_default_markerset(model, log, markerset)

        return replace(model, gravity=env.gravity, provenance=inputs.provenance(read))

    def _build_object(
        self,
        env: Environment,
        index: int,
        dictionary: Dictionary,
        human: KinematicModel,
        inputs: _Inputs,
        log: DiagnosticLog,
    ) -> KinematicModel:
        entry = env.objects[index - 1]
        read: list[str] = []

        def load(path: str) -> str:
            resolved = env.resolve(path)
            read.append(inputs.label(resolved))
            return inputs.read(resolved)

        description = parse_description(load(entry.description), entry.description, log)
        setup = parse_object_setup(load(entry.setup), entry.setup, log)
        policies = (
            parse_mass_properties(load(entry.mass_properties), entry.mass_properties, log)
            if entry.mass_properties
            else {}
        )
        model = build_object_model(
            description,
            dictionary,
            setup,
            policies,
            human,
            name=_model_name(entry.save, f"object{index}"),
            base_dir=env.base_dir,
            log=log,
        )

        features = []
        if entry.anthropometry:
            features.append(Functionality.ANTHROPOMETRY)
        if entry.scaling_algorithm:
            features.append(Functionality.SCALING_ALGORITHMS)
        if entry.custom_lengths:
            features.append(Functionality.CUSTOM_SCALING)

        return replace(
            model.with_features(*features),
            gravity=env.gravity,
            provenance=inputs.provenance(read),
        )

    def _place_markers(
        self,
        marker_spec: MarkerSpec,
        human: KinematicModel,
        objects: list[KinematicModel],
        log: DiagnosticLog,
    ) -> tuple[KinematicModel, list[KinematicModel]]:
        models = [human, *objects]
        rows: list[list[MarkerRow]] = [[] for _ in models]
        for row in marker_spec.rows:
            owner = next(
                (i for i, m in enumerate(models) if m.segment(row.segment)), None
            )
            if owner is None:
                log.error(
                    "UnknownSegment",
                    f"markers reference unknown segment {row.segment!r}",
                    line=row.line,
                    file=marker_spec.source,
                    location=row.segment,
                )
                continue
            rows[owner].append(row)
        log.raise_if_errors()

        placed = [
            place_markers(m, MarkerSpec(tuple(r), marker_spec.source), log) if r else m
            for m, r in zip(models, rows, strict=True)
        ]
        return placed[0], placed[1:]

    def _apply_loops(
        self,
        env: Environment,
        dictionary: Dictionary,
        human: KinematicModel,
        objects: list[KinematicModel],
    ) -> tuple[KinematicModel, list[KinematicModel], list[LoopConstraintSet]]:
        deferred = []
        for name in env.loop_sets:
            loop_set = dictionary.loop_sets.get(name)
            if loop_set is None:
                raise DictionaryError(
                    "UnknownDictionaryName",
                    f"unknown loop constraint set {name!r}",
                    file=env.source,
                    location=name,
                )
            if loop_set_fits(loop_set, human):
                human = with_loop_constraints(
                    human, resolve_loop_constraints(loop_set, human)
                )
                continue
            for i, obj in enumerate(objects):
                if loop_set_fits(loop_set, obj):
                    objects[i] = with_loop_constraints(
                        obj, resolve_loop_constraints(loop_set, obj)
                    )
                    break
            else:
                deferred.append(loop_set)
        return human, objects, deferred


def _model_name(save: str | None, fallback: str) -> str:
    return Path(save).stem if save else fallback


def _mass_feature(kind: MassPolicyKind) -> Functionality:
    if kind == MassPolicyKind.USE_MEAN_DENSITY:
        return Functionality.MASS_FROM_MESH
    return Functionality.MASS_FROM_USER


def _lengths_by_type(
    lengths: dict[str, float], description: ModelDescription
) -> dict[str, float]:
    """Key custom lengths by segment type; segment names are mapped through
    the description and segment types are accepted as they are."""
    by_type = {}
    for key, value in lengths.items():
        by_type[description.type_of(key) or key] = value
    return by_type
