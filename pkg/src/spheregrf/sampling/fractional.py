"""Sampling Whittle-Matern fields with the SFEM recursion and sinc quadrature."""

import math
from dataclasses import dataclass, field

import numpy as np
import structlog

from spheregrf.mesh.sphere import MAX_LEVEL, MeshSizeError, TriangleMesh, icosphere, mesh_size
from spheregrf.sampling.noise import NoiseMode, NoiseProjector, sample_white_noise, transfer_noise
from spheregrf.sfem.assembly import FemField, FemOperators
from spheregrf.sfem.solver import ConvergenceError, SolverConfig, conjugate_gradient
from spheregrf.spectral.harmonics import HarmonicCoeffs
from spheregrf.spectral.oracle import spectral_solution
from spheregrf.spectral.sinc import SincQuadrature, sinc_nodes, split_beta

logger = structlog.get_logger()

# Finest level whose mesh size is measured directly when calibrating.
MEASURED_LEVEL_LIMIT = 6


@dataclass(frozen=True)
class ModelParams:
    """Parameters of one discrete field model.

    Attributes:
        beta: Smoothness exponent, > 1/2
        kappa: Inverse correlation length, > 0
        degree: Noise truncation degree L
        step: Sinc quadrature step k
        noise_mode: Transfer of W_L into the finite element space
        solver: Conjugate gradient settings for every linear solve
    """

    beta: float
    kappa: float
    degree: int
    step: float
    noise_mode: NoiseMode = field(default_factory=NoiseMode.project)
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.beta <= 0.5:
            msg = f"beta must exceed 1/2, got {self.beta}"
            raise ValueError(msg)
        if self.kappa <= 0:
            msg = f"kappa must be positive, got {self.kappa}"
            raise ValueError(msg)
        if self.degree < 0:
            msg = f"noise degree L must be nonnegative, got {self.degree}"
            raise ValueError(msg)
        if self.step <= 0:
            msg = f"quadrature step k must be positive, got {self.step}"
            raise ValueError(msg)

    @property
    def floor_beta(self) -> int:
        return split_beta(self.beta)[0]

    @property
    def frac_beta(self) -> float:
        return split_beta(self.beta)[1]

    @property
    def quadrature(self) -> SincQuadrature | None:
        """Sinc rule for the fractional part, or None on the integer bypass."""
        if self.frac_beta == 0.0:
            return None
        return sinc_nodes(self.frac_beta, self.step)


def linear_solve_count(params: ModelParams) -> int:
    """Number of SFEM solves one sample needs, excluding the noise projection."""
    rule = params.quadrature
    if rule is None:
        return params.floor_beta
    return rule.n_nodes + params.floor_beta


def solve_recursion(
    operators: FemOperators,
    noise_field: FemField,
    floor_beta: int,
    kappa: float,
    config: SolverConfig | None = None,
) -> FemField:
    """Apply (kappa^2 M + S)^(-1) M to the field ``floor_beta`` times.

    Raises:
        ConvergenceError: Tagged with the 1-based recursion step that failed
    """
    if floor_beta < 0:
        msg = f"floor_beta must be nonnegative, got {floor_beta}"
        raise ValueError(msg)

    config = config or SolverConfig()
    matrix = operators.helmholtz(kappa**2, 1.0)
    current = noise_field
    for step in range(1, floor_beta + 1):
        try:
            result = conjugate_gradient(matrix, operators.weak(current), config)
        except ConvergenceError as error:
            raise error.at_stage(f"recursion step {step}") from error
        current = FemField(operators.mesh, result.solution)
        logger.debug("recursion step solved", step=step, iterations=result.iterations)
    return current


def shifted_system(node: float, kappa: float, rule: SincQuadrature) -> tuple[float, float, float]:
    """Return (c0, c1, weight) of the subproblem at sinc node ``node``.

    Nodes y <= 0 use ((1 + e^2y kappa^2) M + e^2y S) x = M f with weight
    w(y). Nodes y > 0 divide that system by e^2y and multiply the weight by
    e^-2y, so no coefficient overflows.
    """
    if node <= 0:
        scale = math.exp(2.0 * node)
        return 1.0 + scale * kappa**2, scale, rule.prefactor * math.exp(2.0 * rule.fraction * node)
    return (
        math.exp(-2.0 * node) + kappa**2,
        1.0,
        rule.prefactor * math.exp(2.0 * (rule.fraction - 1.0) * node),
    )


def apply_fractional(
    operators: FemOperators, field_in: FemField, params: ModelParams
) -> FemField:
    """Apply the sinc approximation of (kappa^2 M + S)^(-frac_beta) M.

    Subproblems are solved and accumulated from the most negative node
    upward. The integer bypass returns ``field_in`` unchanged.

    Raises:
        ConvergenceError: Tagged with the sinc node index that failed
    """
    rule = params.quadrature
    if rule is None:
        return field_in

    rhs = operators.weak(field_in)
    total = np.zeros(operators.mesh.n_vertices)
    previous = None
    for index, node in zip(rule.indices, rule.nodes):
        c0, c1, weight = shifted_system(float(node), params.kappa, rule)
        guess = previous if params.solver.warm_start else None
        try:
            result = conjugate_gradient(operators.helmholtz(c0, c1), rhs, params.solver, guess)
        except ConvergenceError as error:
            raise error.at_stage(f"sinc node {index}") from error
        total += weight * result.solution
        previous = result.solution

    logger.debug("fractional power applied", nodes=rule.n_nodes, fraction=rule.fraction)
    return FemField(operators.mesh, total)


@dataclass(frozen=True, eq=False)
class FieldSample:
    """One Monte Carlo draw.

    Attributes:
        fem: SFEM approximation u_{L,h}
        spectral: Exact truncated solution u_L built from the same noise
        noise: White noise coefficients W_L
        noise_field: W_L transferred into the finite element space
    """

    fem: FemField
    spectral: HarmonicCoeffs
    noise: HarmonicCoeffs
    noise_field: FemField


def sample_rng(base_seed: int, sample_index: int) -> np.random.Generator:
    """Generator owned by one sample, keyed by (base_seed, sample_index)."""
    if base_seed < 0 or sample_index < 0:
        msg = f"seeds must be nonnegative, got base_seed={base_seed}, sample_index={sample_index}"
        raise ValueError(msg)
    return np.random.default_rng(np.random.SeedSequence([base_seed, sample_index]))


class FieldSampler:
    """Draws field samples on one mesh, reusing matrices across samples.

    The operators and the projection Gram matrix are built once and only
    read afterwards, so one sampler can serve concurrent workers.
    """

    def __init__(
        self,
        mesh: TriangleMesh,
        params: ModelParams,
        operators: FemOperators | None = None,
    ):
        """Assemble everything the samples on ``mesh`` share.

        Args:
            mesh: Target mesh
            params: Field model
            operators: Prebuilt mass and stiffness matrices of ``mesh``
        """
        self.mesh = mesh
        self.params = params
        self.operators = operators or FemOperators.assemble(mesh)
        mode = params.noise_mode
        self.projector = (
            NoiseProjector(mesh, mode.order, params.solver) if mode.kind == "project" else None
        )

    def noise_field(self, noise: HarmonicCoeffs) -> FemField:
        return transfer_noise(noise, self.mesh, self.params.noise_mode, self.projector)

    def solve(self, noise_field: FemField) -> FemField:
        """Run the recursion and the fractional step on a transferred noise field."""
        params = self.params
        recursed = solve_recursion(
            self.operators, noise_field, params.floor_beta, params.kappa, params.solver
        )
        return apply_fractional(self.operators, recursed, params)

    def sample(self, sample_index: int, base_seed: int) -> FieldSample:
        params = self.params
        noise = sample_white_noise(params.degree, sample_rng(base_seed, sample_index))
        try:
            noise_field = self.noise_field(noise)
            fem = self.solve(noise_field)
        except ConvergenceError as error:
            raise error.at_stage(f"sample {sample_index}") from error
        return FieldSample(
            fem=fem,
            spectral=spectral_solution(noise, params.beta, params.kappa),
            noise=noise,
            noise_field=noise_field,
        )


def sample_field(
    mesh: TriangleMesh, params: ModelParams, sample_index: int, base_seed: int
) -> FieldSample:
    """Draw one sample of the SFEM field and its exact spectral counterpart.

    Args:
        mesh: Target mesh
        params: Field model
        sample_index: Index of the sample within a study
        base_seed: Study seed; (base_seed, sample_index) fixes the noise

    Returns:
        FieldSample with the FEM field, the spectral solution and the noise
    """
    return FieldSampler(mesh, params).sample(sample_index, base_seed)


@dataclass(frozen=True)
class DiscretizationPlan:
    """Mesh size, quadrature step and icosphere level balancing the error terms."""

    h: float
    k: float
    level: int


def _estimated_inball(level: int, measured: dict[int, float]) -> float:
    if level <= MEASURED_LEVEL_LIMIT:
        if level not in measured:
            measured[level] = mesh_size(icosphere(level)).h_inball
        return measured[level]
    # finer levels roughly halve the in-ball radius per refinement
    return _estimated_inball(MEASURED_LEVEL_LIMIT, measured) / 2.0 ** (
        level - MEASURED_LEVEL_LIMIT
    )


def calibrate_discretization(beta: float, degree: int) -> DiscretizationPlan:
    """Choose h ~ L^-(beta+1) and k ~ 1/(beta log(L+1)) for truncation degree L.

    Args:
        beta: Smoothness exponent, > 1/2
        degree: Noise truncation degree L, >= 1

    Returns:
        DiscretizationPlan with the coarsest level whose in-ball radius is <= h

    Raises:
        MeshSizeError: If no level up to the guard is fine enough
    """
    if beta <= 0.5:
        msg = f"beta must exceed 1/2, got {beta}"
        raise ValueError(msg)
    if degree < 1:
        msg = f"calibration needs a truncation degree of at least 1, got {degree}"
        raise ValueError(msg)

    h = float(degree) ** (-(beta + 1.0))
    k = 1.0 / (beta * math.log(degree + 1.0))
    measured: dict[int, float] = {}
    for level in range(MAX_LEVEL + 1):
        if _estimated_inball(level, measured) <= h:
            logger.info("discretization calibrated", beta=beta, L=degree, h=h, k=k, level=level)
            return DiscretizationPlan(h=h, k=k, level=level)

    msg = f"mesh size {h:.3g} for L={degree} needs more than {MAX_LEVEL} refinements"
    raise MeshSizeError(msg)
