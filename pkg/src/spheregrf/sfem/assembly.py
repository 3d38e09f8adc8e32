"""P1 surface finite element matrices on the polyhedral sphere."""

from dataclasses import dataclass

import numpy as np
import structlog
from scipy import sparse

from spheregrf.mesh.sphere import TriangleMesh

logger = structlog.get_logger()

SparseSymmetricMatrix = sparse.csr_matrix

_LOCAL_MASS = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


@dataclass(frozen=True, eq=False)
class FemField:
    """Nodal coefficients of a P1 function on a mesh.

    The lift to the sphere shares the nodal values, so the same vector also
    represents the lifted function.
    """

    mesh: TriangleMesh
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.mesh.n_vertices,):
            msg = (
                f"field has shape {self.values.shape}, expected ({self.mesh.n_vertices},) "
                "for this mesh"
            )
            raise ValueError(msg)

    @classmethod
    def constant(cls, mesh: TriangleMesh, value: float) -> "FemField":
        return cls(mesh, np.full(mesh.n_vertices, float(value)))


def _scatter(mesh: TriangleMesh, local: np.ndarray) -> SparseSymmetricMatrix:
    """Accumulate per-triangle 3x3 blocks into a global CSR matrix.

    All matrices on one mesh share the same COO index arrays, so their CSR
    patterns coincide.
    """
    rows = np.repeat(mesh.triangles, 3, axis=1).reshape(-1)
    cols = np.tile(mesh.triangles, (1, 3)).reshape(-1)
    n = mesh.n_vertices
    matrix = sparse.coo_matrix((local.reshape(-1), (rows, cols)), shape=(n, n)).tocsr()
    matrix.sort_indices()
    return matrix


def assemble_mass(mesh: TriangleMesh) -> SparseSymmetricMatrix:
    """Assemble the consistent P1 mass matrix on the flat triangles.

    Args:
        mesh: Triangulated sphere

    Returns:
        Symmetric positive definite CSR matrix whose entries sum to the flat area
    """
    local = mesh.geometry.areas[:, np.newaxis, np.newaxis] * _LOCAL_MASS
    return _scatter(mesh, local)


def assemble_stiffness(mesh: TriangleMesh) -> SparseSymmetricMatrix:
    """Assemble the P1 stiffness matrix from flat in-plane gradients.

    Args:
        mesh: Triangulated sphere

    Returns:
        Symmetric positive semidefinite CSR matrix with constants in its kernel
    """
    geometry = mesh.geometry
    local = geometry.areas[:, np.newaxis, np.newaxis] * np.einsum(
        "tik,tjk->tij", geometry.gradients, geometry.gradients
    )
    return _scatter(mesh, local)


def helmholtz_matrix(
    mass: SparseSymmetricMatrix,
    stiffness: SparseSymmetricMatrix,
    c0: float,
    c1: float,
) -> SparseSymmetricMatrix:
    """Form c0*M + c1*S.

    Args:
        mass: Mass matrix
        stiffness: Stiffness matrix assembled on the same mesh
        c0: Mass coefficient, >= 0
        c1: Stiffness coefficient, >= 0

    Returns:
        The combined matrix, SPD whenever c0 > 0

    Raises:
        ValueError: If both coefficients vanish or either is negative
    """
    if c0 < 0 or c1 < 0:
        msg = f"helmholtz coefficients must be nonnegative, got c0={c0}, c1={c1}"
        raise ValueError(msg)
    if c0 == 0 and c1 == 0:
        msg = "helmholtz coefficients c0 and c1 cannot both be zero"
        raise ValueError(msg)
    if mass.shape != stiffness.shape:
        msg = f"mass {mass.shape} and stiffness {stiffness.shape} shapes differ"
        raise ValueError(msg)

    if _same_pattern(mass, stiffness):
        return sparse.csr_matrix(
            (c0 * mass.data + c1 * stiffness.data, mass.indices, mass.indptr),
            shape=mass.shape,
        )
    return (c0 * mass + c1 * stiffness).tocsr()


def _same_pattern(a: SparseSymmetricMatrix, b: SparseSymmetricMatrix) -> bool:
    return np.array_equal(a.indptr, b.indptr) and np.array_equal(a.indices, b.indices)


@dataclass(frozen=True, eq=False)
class FemOperators:
    """Mass and stiffness matrices of one mesh, assembled once and shared read-only."""

    mesh: TriangleMesh
    mass: SparseSymmetricMatrix
    stiffness: SparseSymmetricMatrix

    @classmethod
    def assemble(cls, mesh: TriangleMesh) -> "FemOperators":
        operators = cls(mesh=mesh, mass=assemble_mass(mesh), stiffness=assemble_stiffness(mesh))
        logger.debug(
            "fem operators assembled",
            level=mesh.level,
            vertices=mesh.n_vertices,
            nonzeros=operators.mass.nnz,
        )
        return operators

    def helmholtz(self, c0: float, c1: float) -> SparseSymmetricMatrix:
        return helmholtz_matrix(self.mass, self.stiffness, c0, c1)

    def weak(self, field: FemField) -> np.ndarray:
        """Return M @ values, the right-hand side pairing a field with every hat function."""
        self._check(field)
        return self.mass @ field.values

    def _check(self, field: FemField) -> None:
        if field.mesh is not self.mesh:
            msg = "field belongs to a different mesh"
            raise ValueError(msg)


def l2_inner(
    mesh: TriangleMesh,
    f: FemField,
    g: FemField,
    mass: SparseSymmetricMatrix | None = None,
) -> float:
    """L2 inner product on the polyhedral sphere.

    Args:
        mesh: Mesh both fields live on
        f: First field
        g: Second field
        mass: Precomputed mass matrix of ``mesh`` (assembled if omitted)

    Returns:
        f^T M g

    Raises:
        ValueError: If either field lives on another mesh
    """
    if f.mesh is not mesh or g.mesh is not mesh:
        msg = "fields must live on the given mesh"
        raise ValueError(msg)
    if mass is None:
        mass = assemble_mass(mesh)
    return float(f.values @ (mass @ g.values))
