#!/usr/bin/env python3
"""
Validate that all attribute references in the Lua model template exist on the
export document models.

Catches template references to renamed or removed document fields at CI time
instead of as StrictUndefined errors during a model export.
"""

import re
import sys
from pathlib import Path

from modelforge.export.document import (
    ContactRowDoc,
    FrameDoc,
    LoopRowDoc,
    ModelDocument,
    PointDoc,
    ProvenanceDoc,
    VisualDoc,
)

# Template loop variable -> document models it may be bound to
MODEL_MAPPINGS = {
    "doc": (ModelDocument,),
    "frame": (FrameDoc,),
    "visual": (VisualDoc,),
    "point": (PointDoc,),
    "p": (ProvenanceDoc,),
    "row": (ContactRowDoc, LoopRowDoc),
}

TEMPLATES_DIR = (
    Path(__file__).parent.parent / "src" / "modelforge" / "export" / "templates"
)


def document_fields() -> dict[str, set[str]]:
    """Field and property names available on each template variable."""
    fields = {}
    for var_name, models in MODEL_MAPPINGS.items():
        names: set[str] = set()
        for model in models:
            names.update(model.model_fields)
            names.update(
                name
                for name, value in vars(model).items()
                if isinstance(value, property)
            )
        fields[var_name] = names
    return fields


def extract_template_references(template_path: Path) -> list[tuple[str, str, int]]:
    """
    Extract attribute references from a Jinja2 template.

    Returns list of (variable_name, attribute_name, line_number) tuples.
    """
    pattern = re.compile(
        r"\b(" + "|".join(MODEL_MAPPINGS) + r")\.([a-zA-Z_][a-zA-Z0-9_]*)"
    )
    references = []
    for line_num, line in enumerate(template_path.read_text().splitlines(), 1):
        for match in pattern.finditer(line):
            references.append((match.group(1), match.group(2), line_num))
    return references


def validate_templates(templates_dir: Path = TEMPLATES_DIR) -> int:
    """
    Validate all templates against the document models.

    Returns 0 if all valid, 1 if errors found.
    """
    print("🔍 Validating template attribute references...\n")

    fields = document_fields()
    template_files = sorted(templates_dir.glob("*.j2"))
    print(f"✓ Found {len(template_files)} template files\n")

    errors = []
    total_refs = 0
    for template_path in template_files:
        references = extract_template_references(template_path)
        total_refs += len(references)
        for var_name, attr_name, line_num in references:
            if attr_name not in fields[var_name]:
                errors.append((template_path.name, line_num, var_name, attr_name))

    print(f"Validated {total_refs} attribute references\n")

    if errors:
        print(f"❌ Found {len(errors)} invalid attribute reference(s):\n")
        for file_name, line_num, var_name, attr_name in errors:
            print(f"  {file_name}:{line_num}")
            print(f"    {var_name}.{attr_name}")
            print(f"    Valid fields: {', '.join(sorted(fields[var_name]))}")
            print()
        return 1

    print("✅ All template attribute references are valid!")
    return 0


if __name__ == "__main__":
    sys.exit(validate_templates())
