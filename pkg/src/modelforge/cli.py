"""Command-line front end: ``create``, ``validate`` and ``inspect``."""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import TextIO

from modelforge import __version__
from modelforge.config import Config, get_config
from modelforge.diagnostics import DiagnosticLog, ModelForgeError
from modelforge.dictionary import JointDescriptor, serialize_joint_code
from modelforge.export import ModelDocument, build_document, load_document
from modelforge.services.pipeline import (
    CreationResult,
    ModelCreationService,
    OutputFormat,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2

_FORMATS = {
    "lua": (OutputFormat.LUA,),
    "json": (OutputFormat.JSON,),
    "all": (OutputFormat.LUA, OutputFormat.JSON, OutputFormat.SCENE),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelforge",
        description="Create scaled human and object multibody models.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-q", "--quiet", action="store_true", help="only log warnings and errors"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    create = commands.add_parser(
        "create", parents=[common], help="build and export the models"
    )
    create.add_argument("env", nargs="?", type=Path, help="environment file")
    create.add_argument("--env", dest="env_option", type=Path, help="environment file")
    create.add_argument(
        "--dry-run", action="store_true", help="validate only, write nothing"
    )
    create.add_argument(
        "--force", action="store_true", help="overwrite existing outputs"
    )
    create.add_argument("--format", choices=sorted(_FORMATS), default="lua")

    validate = commands.add_parser(
        "validate", parents=[common], help="check an environment"
    )
    validate.add_argument("env", type=Path)

    inspect = commands.add_parser(
        "inspect", parents=[common], help="describe a model"
    )
    inspect.add_argument("path", type=Path, help="environment file or JSON model")
    query = inspect.add_mutually_exclusive_group()
    query.add_argument("--tree", action="store_true", help="segment tree")
    query.add_argument("--dof", action="store_true", help="degrees of freedom")
    query.add_argument("--masses", action="store_true", help="segment masses")
    query.add_argument("--segment", metavar="NAME", help="one segment record")
    inspect.add_argument(
        "--model",
        default="human",
        help="human, objectK or combined (environment files only)",
    )
    inspect.add_argument("--json", action="store_true", help="print JSON")
    return parser


def print_diagnostics(log: DiagnosticLog, stream: TextIO | None = None) -> None:
    for diagnostic in log:
        print(diagnostic, file=stream or sys.stderr)


def _summary(result: CreationResult, out: TextIO) -> None:
    for model in result.models():
        print(
            f"{model.name} ({model.kind.value}): {len(model.segments)} segments, "
            f"{model.dof} DoF, {model.total_mass:.3f} kg, "
            f"{len(model.marker_names())} markers",
            file=out,
        )
    for path in result.outputs:
        print(f"wrote {path}", file=out)


def cmd_create(args: argparse.Namespace, config: Config, out: TextIO) -> int:
    env_path = args.env_option or args.env
    if env_path is None:
        print("modelforge create: an environment file is required", file=sys.stderr)
        return EXIT_USAGE
    service = ModelCreationService(config)
    result = service.create(
        env_path,
        formats=_FORMATS[args.format],
        force=args.force,
        dry_run=args.dry_run,
    )
    print_diagnostics(result.log)
    if not result.ok:
        return EXIT_ERROR
    _summary(result, out)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, config: Config, out: TextIO) -> int:
    result = ModelCreationService(config).build(args.env)
    print_diagnostics(result.log)
    if not result.ok:
        return EXIT_ERROR
    _summary(result, out)
    print("valid", file=out)
    return EXIT_OK


def _select(result: CreationResult, name: str) -> ModelDocument | None:
    if name == "human":
        model = result.human
    elif name == "combined":
        model = result.combined
    elif name.startswith("object") and name[6:].isdigit():
        index = int(name[6:])
        if 0 < index <= len(result.objects):
            model = result.objects[index - 1]
        else:
            model = None
    else:
        model = None
    return build_document(model) if model else None


def _load(args: argparse.Namespace, config: Config) -> ModelDocument | int:
    path: Path = args.path
    if path.suffix.lower() == ".json":
        try:
            return load_document(path.read_text(encoding="utf-8"), source=str(path))
        except (OSError, ModelForgeError) as e:
            print(f"{path}: {e}", file=sys.stderr)
            return EXIT_ERROR

    result = ModelCreationService(config).build(path)
    if not result.ok:
        print_diagnostics(result.log)
        return EXIT_ERROR
    document = _select(result, args.model)
    if document is None:
        print(
            f"modelforge inspect: no model {args.model!r} in {path}", file=sys.stderr
        )
        return EXIT_USAGE
    return document


def _depths(document: ModelDocument) -> dict[str, int]:
    depths = {"ROOT": -1}
    for frame in document.frames:
        depths[frame.name] = depths.get(frame.parent, -1) + 1
    return depths


def _joint_code(rows: list[list[int]]) -> str:
    if not rows:
        return "fixed"
    descriptor = JointDescriptor("", tuple(tuple(r) for r in rows))  # type: ignore[misc]
    try:
        return serialize_joint_code(descriptor)
    except ValueError:
        return "custom"


def cmd_inspect(args: argparse.Namespace, config: Config, out: TextIO) -> int:
    loaded = _load(args, config)
    if isinstance(loaded, int):
        return loaded
    document = loaded

    if args.segment:
        frame = document.frame(args.segment)
        if frame is None:
            print(f"no segment {args.segment!r}", file=sys.stderr)
            return EXIT_ERROR
        print(frame.model_dump_json(indent=2), file=out)
        return EXIT_OK

    if args.tree:
        depths = _depths(document)
        rows = [
            {
                "name": f.name,
                "parent": f.parent,
                "depth": depths[f.name],
                "joint": _joint_code(f.joint),
            }
            for f in document.frames
        ]
        if args.json:
            print(json.dumps(rows, indent=2), file=out)
        else:
            for f, row in zip(document.frames, rows, strict=True):
                indent = "  " * depths[f.name]
                print(f"{indent}{f.name} [{row['joint']}]", file=out)
        return EXIT_OK

    if args.dof or args.masses:
        key = "dof" if args.dof else "mass"
        values = {
            f.name: len(f.joint) if args.dof else f.body.mass for f in document.frames
        }
        total = document.dof if args.dof else document.total_mass
        if args.json:
            print(json.dumps({key: values, "total": total}, indent=2), file=out)
        else:
            width = max((len(n) for n in values), default=5)
            for name, value in values.items():
                print(f"{name:<{width}}  {value}", file=out)
            print(f"{'total':<{width}}  {total}", file=out)
        return EXIT_OK

    summary = {
        "name": document.name,
        "kind": document.kind,
        "segments": len(document.frames),
        "dof": document.dof,
        "total_mass": document.total_mass,
        "markers": sum(len(f.markers or {}) for f in document.frames),
        "points": len(document.points),
        "constraint_sets": list(document.constraint_sets),
    }
    if args.json:
        print(json.dumps(summary, indent=2), file=out)
    else:
        for key, value in summary.items():
            print(f"{key}: {value}", file=out)
    return EXIT_OK


_COMMANDS = {"create": cmd_create, "validate": cmd_validate, "inspect": cmd_inspect}


def run(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    """Parse arguments and run one command; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.quiet:
        logging.getLogger().setLevel(logging.WARNING)

    config = get_config()
    for problem in config.validate():
        logger.error("Configuration error: %s", problem)
    return _COMMANDS[args.command](args, config, out or sys.stdout)
