"""Lua model files rendered from the export document."""

import logging
import re
from collections.abc import Sequence
from pathlib import Path

from jinja2 import Environment, PackageLoader, StrictUndefined

from modelforge import __version__
from modelforge.diagnostics import DiagnosticLog, ExportError
from modelforge.export.document import ModelDocument, build_document
from modelforge.kinematics import KinematicModel, combine_models
from modelforge.validation import ensure_valid

logger = logging.getLogger(__name__)

TEMPLATE_NAME = "model.lua.j2"

_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_LUA_KEYWORDS = frozenset(
    "and break do else elseif end false for function goto if in local nil not "
    "or repeat return then true until while".split()
)
_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def lua_literal(value: object) -> str:
    """Lua source for a scalar, string or (nested) list.

    Floats use the shortest text that reads back as the same double.
    """
    if value is None:
        return "nil"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(float(value))
    if isinstance(value, str):
        return '"' + "".join(_ESCAPES.get(c, c) for c in value) + '"'
    if isinstance(value, list | tuple):
        if not value:
            return "{}"
        return "{ " + ", ".join(lua_literal(v) for v in value) + " }"
    raise TypeError(f"cannot write {type(value).__name__} as Lua")


def lua_key(name: str) -> str:
    """Table key: bare identifier when possible, ``["..."]`` otherwise."""
    if _IDENTIFIER.match(name) and name not in _LUA_KEYWORDS:
        return name
    return f"[{lua_literal(name)}]"


def _environment() -> Environment:
    env = Environment(
        loader=PackageLoader("modelforge.export", "templates"),
        autoescape=False,
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
        undefined=StrictUndefined,
    )
    env.filters["lua"] = lua_literal
    env.filters["lua_key"] = lua_key
    return env


def render_document(document: ModelDocument) -> str:
    template = _environment().get_template(TEMPLATE_NAME)
    return template.render(doc=document, version=__version__)


def write_lua_model(model: KinematicModel) -> str:
    """Render a validated model as a Lua model table.

    Raises:
        ExportError: ``ValidationFailed`` when the model has validation errors.
    """
    ensure_valid(model)
    text = render_document(build_document(model))
    logger.debug("Rendered %s: %d bytes of Lua", model.name, len(text))
    return text


def write_combined(
    human: KinematicModel,
    objects: Sequence[KinematicModel],
    log: DiagnosticLog | None = None,
) -> str:
    """Combine a human with its objects and render one Lua model.

    With no objects the output equals :func:`write_lua_model` of the human.
    """
    if not objects:
        return write_lua_model(human)
    return write_lua_model(combine_models(human, objects, log))


def save_text(path: Path, text: str, *, force: bool = False) -> Path:
    """Write an output file, refusing to replace an existing one unless forced.

    Raises:
        ExportError: ``OutputExists``.
    """
    if path.exists() and not force:
        raise ExportError(
            "OutputExists",
            f"{path} already exists; use --force to overwrite",
            file=str(path),
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    logger.info("Wrote %s", path)
    return path
