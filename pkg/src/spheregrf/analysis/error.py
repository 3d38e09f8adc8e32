"""L2(S^2) distance between lifted finite element fields and harmonic expansions."""

import numpy as np

from spheregrf.mesh.quadrature import LiftedQuadrature
from spheregrf.mesh.sphere import TriangleMesh
from spheregrf.sfem.assembly import FemField
from spheregrf.spectral.harmonics import HarmonicCoeffs, eval_expansion


def lifted_l2_error(
    mesh: TriangleMesh,
    fem: FemField,
    reference: HarmonicCoeffs,
    order: int = 5,
    quadrature: LiftedQuadrature | None = None,
) -> float:
    """Measure ||reference - fem^lift|| in L2(S^2).

    The finite element field is interpolated at the flat quadrature point and
    the reference evaluated at its radial image; the lifted weights carry the
    surface element.

    Args:
        mesh: Mesh the field lives on
        fem: Finite element field
        reference: Exact expansion
        order: Triangle quadrature order, used when ``quadrature`` is omitted
        quadrature: Prebuilt lifted rule on ``mesh``, shared across samples

    Returns:
        The lifted L2 error

    Raises:
        ValueError: If the field or the quadrature belongs to another mesh
    """
    if fem.mesh is not mesh:
        msg = "field belongs to a different mesh"
        raise ValueError(msg)
    if quadrature is None:
        quadrature = LiftedQuadrature.build(mesh, order)
    elif quadrature.mesh is not mesh:
        msg = "quadrature was built on a different mesh"
        raise ValueError(msg)

    difference = eval_expansion(reference, quadrature.lifted_points) - (
        quadrature.interpolation @ fem.values
    )
    return float(np.sqrt(quadrature.integrate(difference**2)))
