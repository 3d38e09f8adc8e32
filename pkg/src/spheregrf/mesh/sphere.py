"""Icosahedral triangulations of the unit sphere."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import structlog

logger = structlog.get_logger()

MAX_LEVEL = 10
UNIT_TOLERANCE = 1e-12
MIN_PROJECTION_NORM = 1e-14

_GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0

_ICOSAHEDRON_VERTICES = np.array(
    [
        [-1.0, _GOLDEN, 0.0],
        [1.0, _GOLDEN, 0.0],
        [-1.0, -_GOLDEN, 0.0],
        [1.0, -_GOLDEN, 0.0],
        [0.0, -1.0, _GOLDEN],
        [0.0, 1.0, _GOLDEN],
        [0.0, -1.0, -_GOLDEN],
        [0.0, 1.0, -_GOLDEN],
        [_GOLDEN, 0.0, -1.0],
        [_GOLDEN, 0.0, 1.0],
        [-_GOLDEN, 0.0, -1.0],
        [-_GOLDEN, 0.0, 1.0],
    ]
)

# Counterclockwise seen from outside.
_ICOSAHEDRON_TRIANGLES = np.array(
    [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ],
    dtype=np.int64,
)


class MeshSizeError(ValueError):
    """Requested refinement level exceeds the memory guard."""


@dataclass(frozen=True)
class TriangleGeometry:
    """Per-triangle flat geometry of a mesh.

    Attributes:
        areas: Flat triangle areas, shape (F,)
        normals: Outward unit normals of the triangle planes, shape (F, 3)
        gradients: P1 shape-function gradients, shape (F, 3, 3); entry [t, i]
            is the in-plane gradient of the hat function of local vertex i
    """

    areas: np.ndarray
    normals: np.ndarray
    gradients: np.ndarray


@dataclass(frozen=True)
class MeshSize:
    """Mesh-size metrics; convergence studies key on ``h_inball``."""

    h_inball: float
    h_diam: float


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Polyhedral approximation of the unit sphere.

    Attributes:
        vertices: Unit-norm vertex coordinates, shape (V, 3)
        triangles: Vertex-index triples, counterclockwise seen from outside, shape (F, 3)
        level: Number of refinements applied to the base icosahedron
    """

    vertices: np.ndarray
    triangles: np.ndarray
    level: int

    def __post_init__(self):
        # freeze private copies; the caller's arrays stay writable
        vertices = np.array(self.vertices, dtype=float)
        triangles = np.array(self.triangles)
        vertices.setflags(write=False)
        triangles.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "triangles", triangles)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @cached_property
    def edges(self) -> np.ndarray:
        """Unique undirected edges as sorted index pairs, lexicographically ordered."""
        return np.unique(np.sort(_directed_edges(self.triangles), axis=1), axis=0)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def euler_characteristic(self) -> int:
        """Return V - E + F."""
        return self.n_vertices - self.n_edges + self.n_triangles

    def is_oriented_manifold(self) -> bool:
        """Check every edge is shared by exactly two triangles traversing it oppositely.

        Returns:
            True if each directed edge occurs once and each undirected edge twice.
        """
        directed = _directed_edges(self.triangles)
        _, directed_counts = np.unique(directed, axis=0, return_counts=True)
        _, undirected_counts = np.unique(np.sort(directed, axis=1), axis=0, return_counts=True)
        # Two uses of an edge with no repeated direction are necessarily opposite.
        return bool(np.all(directed_counts == 1) and np.all(undirected_counts == 2))

    @cached_property
    def geometry(self) -> TriangleGeometry:
        """Flat areas, outward normals and P1 gradients, computed once per mesh."""
        corners = self.vertices[self.triangles]
        x0, x1, x2 = corners[:, 0], corners[:, 1], corners[:, 2]

        cross = np.cross(x1 - x0, x2 - x0)
        doubled_area = np.linalg.norm(cross, axis=1)
        normals = cross / doubled_area[:, np.newaxis]

        # Edge opposite each local vertex, traversed counterclockwise.
        opposite = np.stack([x2 - x1, x0 - x2, x1 - x0], axis=1)
        gradients = np.cross(normals[:, np.newaxis, :], opposite) / doubled_area[
            :, np.newaxis, np.newaxis
        ]

        areas = doubled_area / 2.0
        for array in (areas, normals, gradients):
            array.setflags(write=False)
        return TriangleGeometry(areas=areas, normals=normals, gradients=gradients)

    def total_area(self) -> float:
        return float(np.sum(self.geometry.areas))

    def summary(self) -> str:
        """One-line mesh statistics."""
        size = mesh_size(self)
        return (
            f"level={self.level} V={self.n_vertices} F={self.n_triangles} "
            f"h_inball={size.h_inball:.6g} h_diam={size.h_diam:.6g}"
        )


def _directed_edges(triangles: np.ndarray) -> np.ndarray:
    return np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]], axis=0
    )


def project_to_sphere(points: np.ndarray) -> np.ndarray:
    """Radially project points onto the unit sphere.

    On the unit sphere the closest-point lift x - d(x) nu(x), with signed
    distance d(x) = |x| - 1 and outward normal nu(x) = x/|x|, reduces to x/|x|.

    Args:
        points: A single point of shape (3,) or an array of shape (n, 3)

    Returns:
        Unit-norm points with the same shape as the input

    Raises:
        ValueError: If any point has norm <= 1e-14
    """
    points = np.asarray(points, dtype=float)
    norms = np.linalg.norm(points, axis=-1, keepdims=True)
    if np.any(norms <= MIN_PROJECTION_NORM):
        msg = "cannot project a point at the origin onto the sphere"
        raise ValueError(msg)
    return points / norms


def subdivide(vertices: np.ndarray, triangles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split every triangle into four at its edge midpoints.

    Midpoints are keyed by edge index, so each shared edge yields one new
    vertex, and are projected onto the sphere immediately.

    Args:
        vertices: Vertex coordinates, shape (V, 3)
        triangles: Counterclockwise vertex-index triples, shape (F, 3)

    Returns:
        Tuple of (vertices, triangles) of the refined mesh
    """
    n_vertices = len(vertices)
    directed = _directed_edges(triangles)
    edges, edge_ids = np.unique(np.sort(directed, axis=1), axis=0, return_inverse=True)
    edge_ids = edge_ids.reshape(3, len(triangles))

    midpoints = project_to_sphere((vertices[edges[:, 0]] + vertices[edges[:, 1]]) / 2.0)

    i, j, k = triangles[:, 0], triangles[:, 1], triangles[:, 2]
    ij, jk, ki = (n_vertices + edge_ids[0], n_vertices + edge_ids[1], n_vertices + edge_ids[2])

    refined = np.stack(
        [
            np.stack([ij, jk, ki], axis=1),
            np.stack([i, ij, ki], axis=1),
            np.stack([j, jk, ij], axis=1),
            np.stack([k, ki, jk], axis=1),
        ],
        axis=1,
    ).reshape(-1, 3)

    return np.concatenate([vertices, midpoints], axis=0), refined


def icosphere(level: int) -> TriangleMesh:
    """Build the icosahedral triangulation of the unit sphere.

    Args:
        level: Number of midpoint subdivisions of the base icosahedron (0..10)

    Returns:
        TriangleMesh with 2 + 10*4**level vertices and 20*4**level triangles

    Raises:
        MeshSizeError: If level exceeds the memory guard
        ValueError: If level is negative
    """
    if level < 0:
        msg = f"refinement level must be nonnegative, got {level}"
        raise ValueError(msg)
    if level > MAX_LEVEL:
        msg = f"refinement level {level} exceeds the limit of {MAX_LEVEL}"
        raise MeshSizeError(msg)

    vertices = project_to_sphere(_ICOSAHEDRON_VERTICES)
    triangles = _ICOSAHEDRON_TRIANGLES.copy()
    for _ in range(level):
        vertices, triangles = subdivide(vertices, triangles)

    mesh = TriangleMesh(vertices=vertices, triangles=triangles, level=level)
    logger.debug(
        "icosphere built",
        level=level,
        vertices=mesh.n_vertices,
        triangles=mesh.n_triangles,
    )
    return mesh


def mesh_size(mesh: TriangleMesh) -> MeshSize:
    """Compute the in-ball radius and diameter of the largest triangle.

    Args:
        mesh: Triangulated sphere

    Returns:
        MeshSize with the largest flat in-circle radius and the longest edge
    """
    corners = mesh.vertices[mesh.triangles]
    edge_lengths = np.linalg.norm(corners[:, [1, 2, 0]] - corners, axis=2)
    perimeters = np.sum(edge_lengths, axis=1)
    inradii = 2.0 * mesh.geometry.areas / perimeters
    return MeshSize(h_inball=float(np.max(inradii)), h_diam=float(np.max(edge_lengths)))
