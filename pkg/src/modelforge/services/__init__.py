"""Services for orchestrating model creation."""

from modelforge.services.pipeline import (
    CreationResult,
    ModelCreationService,
    OutputFormat,
)

__all__ = ["CreationResult", "ModelCreationService", "OutputFormat"]
