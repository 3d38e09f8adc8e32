"""Truncated white noise and its transfer into the P1 space."""

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import structlog

from spheregrf.mesh.quadrature import LiftedQuadrature
from spheregrf.mesh.sphere import TriangleMesh
from spheregrf.sfem.assembly import FemField
from spheregrf.sfem.solver import ConvergenceError, SolverConfig, conjugate_gradient
from spheregrf.spectral.harmonics import HarmonicCoeffs, eval_expansion

logger = structlog.get_logger()

PROJECTION_ORDERS = (2, 5)


@dataclass(frozen=True)
class NoiseMode:
    """How W_L enters the finite element space.

    ``interpolate`` takes nodal values; ``project`` computes the L2(S^2)
    projection onto the lifted hat functions with a lifted quadrature of
    ``order``.
    """

    kind: Literal["interpolate", "project"] = "project"
    order: int = 5

    def __post_init__(self):
        if self.kind not in ("interpolate", "project"):
            msg = f"unknown noise mode {self.kind!r}, expected 'interpolate' or 'project'"
            raise ValueError(msg)
        if self.kind == "project" and self.order not in PROJECTION_ORDERS:
            msg = (
                f"projection quadrature order must be one of {PROJECTION_ORDERS}, "
                f"got {self.order}"
            )
            raise ValueError(msg)

    @classmethod
    def interpolate(cls) -> "NoiseMode":
        return cls(kind="interpolate")

    @classmethod
    def project(cls, order: int = 5) -> "NoiseMode":
        return cls(kind="project", order=order)

    def __str__(self) -> str:
        return self.kind if self.kind == "interpolate" else f"project(order={self.order})"


def sample_white_noise(degree: int, rng: np.random.Generator) -> HarmonicCoeffs:
    """Draw (degree+1)^2 independent standard normal harmonic coefficients."""
    if degree < 0:
        msg = f"noise degree must be nonnegative, got {degree}"
        raise ValueError(msg)
    return HarmonicCoeffs(degree, rng.standard_normal((degree + 1) ** 2))


def interpolate_noise(coeffs: HarmonicCoeffs, mesh: TriangleMesh) -> FemField:
    """Nodal interpolant of the expansion; vertices already lie on the sphere."""
    return FemField(mesh, eval_expansion(coeffs, mesh.vertices))


@dataclass(eq=False)
class NoiseProjector:
    """L2(S^2) projection onto the lifted P1 space with a cached Gram matrix.

    Attributes:
        mesh: Mesh of the target space
        order: Lifted quadrature order used for the Gram matrix and the load
        solver: Settings for the Gram solve
    """

    mesh: TriangleMesh
    order: int = 5
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.order not in PROJECTION_ORDERS:
            msg = (
                f"projection quadrature order must be one of {PROJECTION_ORDERS}, "
                f"got {self.order}"
            )
            raise ValueError(msg)
        self.quadrature = LiftedQuadrature.build(self.mesh, self.order)
        self.gram = self.quadrature.gram_matrix()

    def load(self, coeffs: HarmonicCoeffs) -> np.ndarray:
        """Pair the expansion with every lifted hat function."""
        return self.quadrature.load_vector(eval_expansion(coeffs, self.quadrature.lifted_points))

    def project(self, coeffs: HarmonicCoeffs) -> FemField:
        try:
            result = conjugate_gradient(self.gram, self.load(coeffs), self.solver)
        except ConvergenceError as error:
            raise error.at_stage("noise projection") from error
        return FemField(self.mesh, result.solution)


def project_noise(
    coeffs: HarmonicCoeffs,
    mesh: TriangleMesh,
    order: int = 5,
    solver: SolverConfig | None = None,
) -> FemField:
    """Project the expansion onto the lifted P1 space of ``mesh``.

    Args:
        coeffs: Noise coefficients
        mesh: Target mesh
        order: Lifted quadrature order, 2 or 5
        solver: Settings for the Gram solve

    Returns:
        FemField whose lift is the L2(S^2)-orthogonal projection

    Raises:
        ConvergenceError: If the Gram solve does not converge
    """
    return NoiseProjector(mesh, order, solver or SolverConfig()).project(coeffs)


def transfer_noise(
    coeffs: HarmonicCoeffs,
    mesh: TriangleMesh,
    mode: NoiseMode,
    projector: NoiseProjector | None = None,
    solver: SolverConfig | None = None,
) -> FemField:
    """Move W_L into the finite element space according to ``mode``.

    A prebuilt ``projector`` takes precedence; otherwise the Gram solve runs
    with ``solver``.
    """
    if mode.kind == "interpolate":
        return interpolate_noise(coeffs, mesh)
    if projector is None:
        return project_noise(coeffs, mesh, mode.order, solver)
    return projector.project(coeffs)
