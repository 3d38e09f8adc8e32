"""Sphere triangulations, mesh metrics and quadrature."""

from spheregrf.mesh.quadrature import LiftedQuadrature, TriangleRule, triangle_quadrature
from spheregrf.mesh.sphere import (
    MeshSize,
    MeshSizeError,
    TriangleGeometry,
    TriangleMesh,
    icosphere,
    mesh_size,
    project_to_sphere,
)

__all__ = [
    "LiftedQuadrature",
    "MeshSize",
    "MeshSizeError",
    "TriangleGeometry",
    "TriangleMesh",
    "TriangleRule",
    "icosphere",
    "mesh_size",
    "project_to_sphere",
    "triangle_quadrature",
]
