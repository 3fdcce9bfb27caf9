"""Small vector/matrix helpers shared by the model and export code.

Model records store plain float tuples so they stay hashable, comparable and
JSON friendly; computation happens on numpy arrays.
"""

from collections.abc import Sequence

import numpy as np
from scipy.spatial.transform import Rotation

Vec3 = tuple[float, float, float]
Mat3 = tuple[Vec3, Vec3, Vec3]

ZERO3: Vec3 = (0.0, 0.0, 0.0)
IDENTITY3: Mat3 = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
ZERO33: Mat3 = (ZERO3, ZERO3, ZERO3)


def as_vec3(values: Sequence[float] | np.ndarray) -> Vec3:
    """Convert to a tuple of three Python floats."""
    x, y, z = (float(v) for v in np.asarray(values, dtype=float).reshape(3))
    return (x, y, z)


def as_mat3(values: Sequence[Sequence[float]] | np.ndarray) -> Mat3:
    """Convert to a row-major tuple of three row tuples."""
    m = np.asarray(values, dtype=float).reshape(3, 3)
    return (as_vec3(m[0]), as_vec3(m[1]), as_vec3(m[2]))


def diag3(x: float, y: float, z: float) -> Mat3:
    return ((float(x), 0.0, 0.0), (0.0, float(y), 0.0), (0.0, 0.0, float(z)))


def euler_xyz_degrees(angles: Sequence[float]) -> np.ndarray:
    """Rotation matrix for intrinsic X-Y-Z Euler angles in degrees."""
    if not np.any(np.asarray(angles, dtype=float)):
        return np.eye(3)
    return Rotation.from_euler("XYZ", list(angles), degrees=True).as_matrix()


def is_finite(values: Sequence[float] | Sequence[Sequence[float]]) -> bool:
    return bool(np.all(np.isfinite(np.asarray(values, dtype=float))))
