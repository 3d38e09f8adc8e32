"""Triangle quadrature rules and their lift to the sphere."""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from spheregrf.mesh.sphere import TriangleMesh, project_to_sphere

SUPPORTED_ORDERS = (1, 2, 5)


@dataclass(frozen=True)
class TriangleRule:
    """Quadrature rule on the reference triangle.

    Attributes:
        points: Barycentric coordinates of the nodes, shape (n, 3)
        weights: Weights normalized to sum to 1, shape (n,)
        order: Polynomial degree integrated exactly
    """

    points: np.ndarray
    weights: np.ndarray
    order: int


def _permutations(a: float, b: float) -> list[list[float]]:
    return [[a, b, b], [b, a, b], [b, b, a]]


def triangle_quadrature(order: int) -> TriangleRule:
    """Return a symmetric quadrature rule exact for polynomials of the given degree.

    Args:
        order: 1 (centroid), 2 (edge midpoints) or 5 (seven-point rule)

    Returns:
        TriangleRule whose weights sum to 1

    Raises:
        ValueError: If the order is not supported
    """
    if order == 1:
        points = [[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]]
        weights = [1.0]
    elif order == 2:
        points = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]
        weights = [1.0 / 3.0] * 3
    elif order == 5:
        root = np.sqrt(15.0)
        points = (
            [[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]]
            + _permutations((9.0 - 2.0 * root) / 21.0, (6.0 + root) / 21.0)
            + _permutations((9.0 + 2.0 * root) / 21.0, (6.0 - root) / 21.0)
        )
        weights = [9.0 / 40.0] + [(155.0 + root) / 1200.0] * 3 + [(155.0 - root) / 1200.0] * 3
    else:
        msg = f"unsupported triangle quadrature order {order}, expected one of {SUPPORTED_ORDERS}"
        raise ValueError(msg)

    return TriangleRule(points=np.array(points), weights=np.array(weights), order=order)


@dataclass(frozen=True, eq=False)
class LiftedQuadrature:
    """Quadrature on the sphere obtained by lifting a flat rule through x -> x/|x|.

    The surface element of the radial projection of a plane point x with unit
    normal nu is dA = (x . nu) / |x|^3 dA_flat, which is folded into ``weights``.

    Attributes:
        mesh: Mesh the rule lives on
        rule: Reference-triangle rule
        flat_points: Quadrature nodes on the flat triangles, shape (F*n, 3)
        lifted_points: The same nodes projected to the sphere, shape (F*n, 3)
        weights: Lifted weights including area and surface element, shape (F*n,)
        interpolation: Sparse (F*n, V) matrix evaluating a P1 nodal vector at the nodes
    """

    mesh: TriangleMesh
    rule: TriangleRule
    flat_points: np.ndarray
    lifted_points: np.ndarray
    weights: np.ndarray
    interpolation: sparse.csr_matrix

    @classmethod
    def build(cls, mesh: TriangleMesh, order: int = 5) -> "LiftedQuadrature":
        """Tabulate the lifted rule of the given order on every triangle."""
        rule = triangle_quadrature(order)
        geometry = mesh.geometry
        n_nodes = len(rule.weights)

        corners = mesh.vertices[mesh.triangles]
        flat_points = np.einsum("qi,tij->tqj", rule.points, corners).reshape(-1, 3)
        norms = np.linalg.norm(flat_points, axis=1)
        normals = np.repeat(geometry.normals, n_nodes, axis=0)
        jacobian = np.einsum("ij,ij->i", flat_points, normals) / norms**3
        weights = np.outer(geometry.areas, rule.weights).reshape(-1) * jacobian

        rows = np.repeat(np.arange(len(flat_points)), 3)
        cols = np.repeat(mesh.triangles, n_nodes, axis=0).reshape(-1)
        values = np.tile(rule.points, (mesh.n_triangles, 1)).reshape(-1)
        interpolation = sparse.csr_matrix(
            (values, (rows, cols)), shape=(len(flat_points), mesh.n_vertices)
        )

        return cls(
            mesh=mesh,
            rule=rule,
            flat_points=flat_points,
            lifted_points=project_to_sphere(flat_points),
            weights=weights,
            interpolation=interpolation,
        )

    def integrate(self, values: np.ndarray) -> float:
        """Integrate samples taken at ``lifted_points`` over the sphere."""
        return float(self.weights @ values)

    def gram_matrix(self) -> sparse.csr_matrix:
        """Gram matrix of the lifted hat functions under this rule."""
        weighted = sparse.diags(self.weights) @ self.interpolation
        return (self.interpolation.T @ weighted).tocsr()

    def load_vector(self, values: np.ndarray) -> np.ndarray:
        """Pair samples at ``lifted_points`` with every lifted hat function."""
        return self.interpolation.T @ (self.weights * values)
