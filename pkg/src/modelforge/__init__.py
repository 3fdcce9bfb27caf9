"""ModelForge - scaled human and object multibody models for rigid-body dynamics tools."""

__version__ = "0.1.0"
