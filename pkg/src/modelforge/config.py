"""Application configuration from environment variables."""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

PACKAGE_DATA_DIR = Path(__file__).parent / "data"


@dataclass(frozen=True)
class Config:
    """Process-wide settings loaded from environment variables.

    Per-run settings (inputs, outputs, gravity) come from the environment file
    instead; see ``modelforge.formats.environment``.
    """

    log_level: str = field(
        default_factory=lambda: os.environ.get("MODELFORGE_LOG_LEVEL", "INFO").upper()
    )

    # Bundled dictionary, scaling tables, markerset and meshes
    data_dir: Path = field(
        default_factory=lambda: Path(
            os.environ.get("MODELFORGE_DATA_DIR", str(PACKAGE_DATA_DIR))
        )
    )

    # Tessellation of primitive visuals
    cylinder_slices: int = field(
        default_factory=lambda: int(os.environ.get("MODELFORGE_CYLINDER_SLICES", "32"))
    )
    sphere_subdivisions: int = field(
        default_factory=lambda: int(
            os.environ.get("MODELFORGE_SPHERE_SUBDIVISIONS", "3")
        )
    )

    @property
    def dictionary_path(self) -> Path:
        """Built-in dictionary file."""
        return self.data_dir / "dictionary" / "builtin.dict"

    @property
    def scaling_dir(self) -> Path:
        return self.data_dir / "scaling"

    @property
    def markerset_path(self) -> Path:
        """Default markerset applied by ``humanModel_AddMarkers``."""
        return self.data_dir / "markers" / "default_markerset.csv"

    @property
    def meshes_dir(self) -> Path:
        return self.data_dir / "meshes"

    def validate(self) -> list[str]:
        """Validate settings. Returns list of problems."""
        errors = []
        if logging.getLevelName(self.log_level) == f"Level {self.log_level}":
            errors.append(f"MODELFORGE_LOG_LEVEL is not a logging level: {self.log_level}")
        if not self.data_dir.is_dir():
            errors.append(f"MODELFORGE_DATA_DIR does not exist: {self.data_dir}")
        if self.cylinder_slices < 3:
            errors.append("MODELFORGE_CYLINDER_SLICES must be at least 3")
        if self.sphere_subdivisions < 0:
            errors.append("MODELFORGE_SPHERE_SUBDIVISIONS must not be negative")
        return errors


def get_config() -> Config:
    """Get application configuration."""
    return Config()
