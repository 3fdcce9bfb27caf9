"""Model exporters: Lua model files, JSON mirror and preview scene."""

from modelforge.export.document import (
    ModelDocument,
    build_document,
    load_document,
    write_json,
)
from modelforge.export.lua import (
    lua_key,
    lua_literal,
    render_document,
    save_text,
    write_combined,
    write_lua_model,
)
from modelforge.export.scene import write_preview_scene

__all__ = [
    "ModelDocument",
    "build_document",
    "load_document",
    "lua_key",
    "lua_literal",
    "render_document",
    "save_text",
    "write_combined",
    "write_json",
    "write_lua_model",
    "write_preview_scene",
]
