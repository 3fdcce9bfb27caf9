"""Triangle meshes: loading, primitives and volume integrals.

Mass properties use the polyhedral integrals of Eberly ("Polyhedral Mass
Properties (Revisited)"), evaluated for all triangles at once. The mesh must
be closed with counter-clockwise outward triangles.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path

import numpy as np

from modelforge.diagnostics import DiagnosticLog, MeshError
from modelforge.spatial import Mat3, Vec3, as_mat3, as_vec3

logger = logging.getLogger(__name__)

CLOSEDNESS_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-9

# Integral weights for 1, x, y, z, x^2, y^2, z^2, xy, yz, zx
_WEIGHTS = np.array(
    [1 / 6, 1 / 24, 1 / 24, 1 / 24, 1 / 60, 1 / 60, 1 / 60, 1 / 120, 1 / 120, 1 / 120]
)


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Vertices ``(n, 3)`` in metres and triangles ``(m, 3)`` of vertex indices."""

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self) -> None:
        vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if triangles.size and (triangles.min() < 0 or triangles.max() >= len(vertices)):
            raise MeshError("MalformedMesh", "triangle index out of range")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "triangles", triangles)

    def __len__(self) -> int:
        return len(self.triangles)

    @property
    def bounds(self) -> np.ndarray:
        """``[[min x, min y, min z], [max x, max y, max z]]``."""
        if not len(self.vertices):
            return np.zeros((2, 3))
        return np.array([self.vertices.min(axis=0), self.vertices.max(axis=0)])

    def translated(self, offset: Sequence[float]) -> "TriMesh":
        return TriMesh(self.vertices + np.asarray(offset, dtype=float), self.triangles)

    def scaled(self, factor: float | Sequence[float]) -> "TriMesh":
        """Scale about the origin, uniformly or per axis."""
        scale = np.broadcast_to(np.asarray(factor, dtype=float), (3,))
        mesh = TriMesh(self.vertices * scale, self.triangles)
        # A negative determinant mirrors the mesh and flips its orientation
        return mesh.reversed() if np.prod(scale) < 0 else mesh

    def transformed(self, rotation: np.ndarray, offset: Sequence[float]) -> "TriMesh":
        """Apply ``x -> R x + t``."""
        R = np.asarray(rotation, dtype=float)
        return TriMesh(self.vertices @ R.T + np.asarray(offset, dtype=float), self.triangles)

    def reversed(self) -> "TriMesh":
        """Same surface with every triangle's winding flipped."""
        return TriMesh(self.vertices, self.triangles[:, ::-1])


@dataclass(frozen=True)
class VolumeProperties:
    """Volume, centroid and unit-density inertia about the centroid."""

    volume: float
    centroid: Vec3
    inertia: Mat3


def load_mesh(text: str, source: str = "<mesh>") -> TriMesh:
    """Parse the ``v``/``f`` subset of Wavefront OBJ.

    Face entries may be written ``a``, ``a/b``, ``a//c`` or ``a/b/c``;
    negative indices count back from the last vertex read. Polygons are
    fan-triangulated. Other statements are ignored.

    Raises:
        MeshError: ``MalformedMesh`` listing every bad line.
    """
    log = DiagnosticLog(source)
    vertices: list[list[float]] = []
    faces: list[tuple[int, list[int]]] = []

    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *rest = line.split()
        if keyword == "v":
            try:
                coords = [float(v) for v in rest[:3]]
            except ValueError:
                coords = []
            if len(coords) != 3 or not all(math.isfinite(c) for c in coords):
                log.error("MalformedMesh", f"bad vertex: {line!r}", line=number)
                continue
            vertices.append(coords)
        elif keyword == "f":
            indices = []
            for token in rest:
                try:
                    index = int(token.split("/", 1)[0])
                except ValueError:
                    index = 0
                if index < 0:
                    index = len(vertices) + index + 1
                if index <= 0:
                    log.error("MalformedMesh", f"bad face index {token!r}", line=number)
                    break
                indices.append(index - 1)
            else:
                if len(indices) < 3:
                    log.error(
                        "MalformedMesh", "face needs at least 3 vertices", line=number
                    )
                    continue
                faces.append((number, indices))

    triangles = []
    for number, indices in faces:
        if max(indices) >= len(vertices):
            log.error(
                "MalformedMesh",
                f"face index {max(indices) + 1} exceeds vertex count {len(vertices)}",
                line=number,
            )
            continue
        for k in range(1, len(indices) - 1):
            triangles.append((indices[0], indices[k], indices[k + 1]))

    log.raise_if_errors(MeshError)
    return TriMesh(np.array(vertices, dtype=float), np.array(triangles, dtype=np.int64))


def load_mesh_file(path: Path) -> TriMesh:
    if not path.is_file():
        raise MeshError("MissingMesh", f"mesh file not found: {path}", file=str(path))
    return load_mesh(path.read_text(encoding="utf-8"), source=str(path))


def serialize_mesh(mesh: TriMesh, index_offset: int = 0) -> str:
    """Wavefront text with 1-based face indices shifted by ``index_offset``."""
    lines = [
        "v " + " ".join(repr(float(c)) for c in vertex) for vertex in mesh.vertices
    ]
    lines += [
        "f " + " ".join(str(int(i) + 1 + index_offset) for i in triangle)
        for triangle in mesh.triangles
    ]
    return "\n".join(lines) + "\n" if lines else ""


def is_closed(mesh: TriMesh) -> bool:
    """Every directed edge is used once and its reverse is used once."""
    if not len(mesh.triangles):
        return False
    t = mesh.triangles
    edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    n = len(mesh.vertices)
    keys = edges[:, 0] * n + edges[:, 1]
    if len(np.unique(keys)) != len(keys):
        return False
    reverse = edges[:, 1] * n + edges[:, 0]
    return bool(np.isin(reverse, keys).all())


def _integrals(mesh: TriMesh) -> np.ndarray:
    tri = mesh.vertices[mesh.triangles]
    v0, v1, v2 = tri[:, 0], tri[:, 1], tri[:, 2]
    d = np.cross(v1 - v0, v2 - v0)

    f1 = v0 + v1 + v2
    f2 = v0**2 + v1**2 + v0 * v1 + v2 * f1
    f3 = v0**3 + v0**2 * v1 + v0 * v1**2 + v1**3 + v2 * f2
    g0 = f2 + v0 * (f1 + v0)
    g1 = f2 + v1 * (f1 + v1)
    g2 = f2 + v2 * (f1 + v2)

    integral = np.zeros((10, len(tri)))
    integral[0] = d[:, 0] * f1[:, 0]
    integral[1:4] = (d * f2).T
    integral[4:7] = (d * f3).T
    for i in range(3):
        j = (i + 1) % 3
        integral[7 + i] = d[:, i] * (
            v0[:, j] * g0[:, i] + v1[:, j] * g1[:, i] + v2[:, j] * g2[:, i]
        )
    return integral.sum(axis=1) * _WEIGHTS


def signed_volume(mesh: TriMesh) -> float:
    """Signed enclosed volume; negative for inward-facing triangles."""
    if not len(mesh.triangles):
        return 0.0
    return float(_integrals(mesh)[0])


def volume_properties(mesh: TriMesh) -> VolumeProperties:
    """Exact volume, centroid and unit-density inertia of a closed mesh.

    Raises:
        MeshError: ``OpenMesh`` when the mesh is not closed, inconsistently
            wound, inside out, or encloses a negligible volume.
    """
    if not is_closed(mesh):
        raise MeshError(
            "OpenMesh", "mesh is not closed or its triangles are inconsistently wound"
        )
    intg = _integrals(mesh)
    volume = float(intg[0])
    extent = np.ptp(mesh.vertices, axis=0)
    if volume < 0:
        raise MeshError("OpenMesh", "mesh triangles face inward (negative volume)")
    if volume <= CLOSEDNESS_TOLERANCE * float(np.prod(extent)):
        raise MeshError("OpenMesh", "mesh encloses no volume")

    cx, cy, cz = intg[1:4] / volume
    xx = intg[5] + intg[6] - volume * (cy**2 + cz**2)
    yy = intg[4] + intg[6] - volume * (cz**2 + cx**2)
    zz = intg[4] + intg[5] - volume * (cx**2 + cy**2)
    xy = -(intg[7] - volume * cx * cy)
    yz = -(intg[8] - volume * cy * cz)
    zx = -(intg[9] - volume * cz * cx)
    inertia = [[xx, xy, zx], [xy, yy, yz], [zx, yz, zz]]
    return VolumeProperties(volume, as_vec3((cx, cy, cz)), as_mat3(inertia))


class MassPolicyKind(StrEnum):
    USE_MEAN_DENSITY = "UseMeanDensity"
    USE_USER_VALUES = "UseUserValues"


@dataclass(frozen=True)
class MassPolicy:
    """How an object segment gets its mass, centre of mass and inertia.

    ``UseMeanDensity`` integrates the segment mesh at ``density`` (kg/m^3);
    ``UseUserValues`` takes ``mass``, ``com`` and ``inertia`` verbatim.
    """

    segment: str
    kind: MassPolicyKind
    density: float | None = None
    mass: float | None = None
    com: Vec3 | None = None
    inertia: Mat3 | None = None
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class MassProperties:
    mass: float
    com: Vec3
    inertia: Mat3


def apply_mass_policy(
    policy: MassPolicy,
    mesh: TriMesh | None,
    scale: Sequence[float] = (1.0, 1.0, 1.0),
) -> MassProperties:
    """Resolve a mass policy to mass, centre of mass and inertia about it.

    Raises:
        MeshError: ``MissingMesh`` for a density policy without a mesh,
            ``AsymmetricUserInertia`` for a non-symmetric user inertia.
    """
    if policy.kind == MassPolicyKind.USE_MEAN_DENSITY:
        if mesh is None:
            raise MeshError(
                "MissingMesh",
                f"{policy.segment}: UseMeanDensity needs a segment mesh",
                location=policy.segment,
            )
        props = volume_properties(mesh.scaled(scale))
        density = policy.density or 0.0
        return MassProperties(
            mass=density * props.volume,
            com=props.centroid,
            inertia=as_mat3(density * np.asarray(props.inertia)),
        )

    inertia = np.asarray(policy.inertia, dtype=float)
    asymmetry = np.linalg.norm(inertia - inertia.T, ord=np.inf)
    if asymmetry > SYMMETRY_TOLERANCE * np.linalg.norm(inertia, ord=np.inf):
        raise MeshError(
            "AsymmetricUserInertia",
            f"{policy.segment}: user inertia is not symmetric",
            location=policy.segment,
        )
    assert policy.mass is not None and policy.com is not None
    return MassProperties(policy.mass, policy.com, as_mat3(inertia))


class PrimitiveKind(StrEnum):
    CUBOID = "cuboid"
    CYLINDER = "cylinder"
    SPHERE = "sphere"


_PRIMITIVE_DIMENSIONS = {
    PrimitiveKind.CUBOID: 3,
    PrimitiveKind.CYLINDER: 2,
    PrimitiveKind.SPHERE: 1,
}

_CUBOID_TRIANGLES = np.array(
    [
        [0, 2, 3], [0, 3, 1],
        [4, 5, 7], [4, 7, 6],
        [0, 1, 5], [0, 5, 4],
        [2, 6, 7], [2, 7, 3],
        [0, 4, 6], [0, 6, 2],
        [1, 3, 7], [1, 7, 5],
    ]
)  # fmt: skip

_PHI = (1.0 + math.sqrt(5.0)) / 2.0
_ICOSAHEDRON_VERTICES = np.array(
    [
        [-1, _PHI, 0], [1, _PHI, 0], [-1, -_PHI, 0], [1, -_PHI, 0],
        [0, -1, _PHI], [0, 1, _PHI], [0, -1, -_PHI], [0, 1, -_PHI],
        [_PHI, 0, -1], [_PHI, 0, 1], [-_PHI, 0, -1], [-_PHI, 0, 1],
    ]
)  # fmt: skip
_ICOSAHEDRON_TRIANGLES = [
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
]  # fmt: skip


def cuboid(x: float, y: float, z: float) -> TriMesh:
    """Box with the given side lengths, centred at the origin."""
    corners = np.array(
        [[(i & 1) - 0.5, ((i >> 1) & 1) - 0.5, ((i >> 2) & 1) - 0.5] for i in range(8)]
    )
    return TriMesh(corners * [x, y, z], _CUBOID_TRIANGLES)


def cylinder(radius: float, height: float, slices: int = 32) -> TriMesh:
    """Closed cylinder along Z, centred at the origin."""
    angles = 2.0 * np.pi * np.arange(slices) / slices
    ring = np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])
    half = height / 2.0
    vertices = np.vstack(
        [
            [[0.0, 0.0, -half], [0.0, 0.0, half]],
            np.column_stack([ring, np.full(slices, -half)]),
            np.column_stack([ring, np.full(slices, half)]),
        ]
    )
    triangles = []
    for k in range(slices):
        n = (k + 1) % slices
        b0, b1 = 2 + k, 2 + n
        t0, t1 = 2 + slices + k, 2 + slices + n
        triangles += [(0, b1, b0), (1, t0, t1), (b0, b1, t1), (b0, t1, t0)]
    return TriMesh(vertices, np.array(triangles))


def icosphere(radius: float, subdivisions: int = 3) -> TriMesh:
    """Sphere by repeated midpoint subdivision of an icosahedron."""
    vertices = [v / np.linalg.norm(v) for v in _ICOSAHEDRON_VERTICES.astype(float)]
    triangles = list(_ICOSAHEDRON_TRIANGLES)

    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                m = vertices[a] + vertices[b]
                vertices.append(m / np.linalg.norm(m))
                cache[key] = len(vertices) - 1
            return cache[key]

        refined = []
        for a, b, c in triangles:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        triangles = refined

    return TriMesh(np.array(vertices) * radius, np.array(triangles))


def make_primitive(
    kind: str,
    dims: Sequence[float],
    *,
    slices: int | None = None,
    subdivisions: int | None = None,
) -> TriMesh:
    """Closed, outward-oriented primitive mesh centred at the origin.

    Args:
        kind: ``cuboid`` (x, y, z), ``cylinder`` (radius, height) or
            ``sphere`` (radius).
        dims: Dimensions in metres.
        slices: Cylinder tessellation; defaults to configuration.
        subdivisions: Icosphere subdivision level; defaults to configuration.

    Raises:
        MeshError: ``UnknownPrimitive``, ``InvalidDimensions`` or
            ``NonPositiveDimension``.
    """
    try:
        primitive = PrimitiveKind(kind.lower())
    except ValueError:
        raise MeshError(
            "UnknownPrimitive",
            f"unknown primitive {kind!r}; expected cuboid, cylinder or sphere",
        ) from None
    if len(dims) != _PRIMITIVE_DIMENSIONS[primitive]:
        raise MeshError(
            "InvalidDimensions",
            f"{primitive} takes {_PRIMITIVE_DIMENSIONS[primitive]} dimensions, "
            f"got {len(dims)}",
        )
    if any(not d > 0 for d in dims):
        raise MeshError(
            "NonPositiveDimension", f"{primitive} dimensions must be positive: {dims}"
        )

    if slices is None or subdivisions is None:
        from modelforge.config import get_config

        config = get_config()
        slices = config.cylinder_slices if slices is None else slices
        if subdivisions is None:
            subdivisions = config.sphere_subdivisions

    if primitive == PrimitiveKind.CUBOID:
        return cuboid(*dims)
    if primitive == PrimitiveKind.CYLINDER:
        return cylinder(dims[0], dims[1], slices)
    return icosphere(dims[0], subdivisions)


@dataclass(frozen=True)
class Visual:
    """Segment visual: a primitive kind or mesh file, its bounding box
    dimensions and the position of the box centre in the segment frame."""

    source: str
    dimensions: Vec3
    center: Vec3

    @property
    def is_primitive(self) -> bool:
        return self.source.lower() in {k.value for k in PrimitiveKind}


def visual_mesh(
    visual: Visual,
    *,
    base_dir: Path | None = None,
    slices: int | None = None,
    subdivisions: int | None = None,
) -> TriMesh:
    """Mesh of a visual in segment coordinates.

    Primitives are generated with unit extents; file meshes are recentred on
    their bounding box. Both are then stretched to ``dimensions`` and moved
    to ``center``. Relative mesh paths are looked up in ``base_dir`` and
    then in the bundled meshes directory.

    Raises:
        MeshError: ``MissingMesh`` when a mesh file cannot be found.
    """
    if visual.is_primitive:
        kind = PrimitiveKind(visual.source.lower())
        unit_dims = {
            PrimitiveKind.CUBOID: (1.0, 1.0, 1.0),
            PrimitiveKind.CYLINDER: (0.5, 1.0),
            PrimitiveKind.SPHERE: (0.5,),
        }[kind]
        mesh = make_primitive(kind, unit_dims, slices=slices, subdivisions=subdivisions)
        extent = np.ones(3)
    else:
        mesh = load_mesh_file(_find_mesh(visual.source, base_dir))
        low, high = mesh.bounds
        mesh = mesh.translated(-(low + high) / 2.0)
        extent = np.where(high - low > 0, high - low, 1.0)

    return mesh.scaled(np.asarray(visual.dimensions) / extent).translated(visual.center)


def _find_mesh(source: str, base_dir: Path | None) -> Path:
    path = Path(source)
    if path.is_absolute():
        return path
    candidates = [base_dir / path] if base_dir is not None else []
    from modelforge.config import get_config

    candidates.append(get_config().meshes_dir / path)
    for candidate in candidates:
        if candidate.is_file():
            return candidate
    raise MeshError("MissingMesh", f"mesh file not found: {source}", location=source)
