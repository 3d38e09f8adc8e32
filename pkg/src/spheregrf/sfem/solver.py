"""Conjugate gradients for the symmetric positive definite SFEM systems."""

from dataclasses import dataclass
from typing import Literal

import numpy as np
import structlog
from scipy import sparse

logger = structlog.get_logger()

# The recursive residual drifts from the true one; refresh it this often.
RESIDUAL_REFRESH_INTERVAL = 50
DEFAULT_ITERATIONS_PER_UNKNOWN = 10

Preconditioner = Literal["none", "jacobi"]


class ConvergenceError(RuntimeError):
    """Conjugate gradients hit the iteration cap before reaching the tolerance.

    Attributes:
        residual: Relative residual ||Ax - b|| / ||b|| at the last iterate
        iterations: Iterations performed
        stage: Where in the pipeline the failing solve ran, empty if unknown
    """

    def __init__(self, message: str, residual: float, iterations: int, stage: str = ""):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.stage = stage

    def at_stage(self, stage: str) -> "ConvergenceError":
        """Return a copy tagged with an outer pipeline stage."""
        combined = f"{stage}: {self.stage}" if self.stage else stage
        return ConvergenceError(
            f"{combined}: {self.args[0]}",
            residual=self.residual,
            iterations=self.iterations,
            stage=combined,
        )


@dataclass(frozen=True)
class SolverConfig:
    """Settings for :func:`conjugate_gradient`.

    Attributes:
        tolerance: Relative residual target, in (0, 1)
        max_iterations: Iteration cap; ``None`` means 10 times the system size
        preconditioner: ``"none"`` or ``"jacobi"`` (diagonal scaling)
        warm_start: Allow callers to pass the previous solution as initial guess
    """

    tolerance: float = 1e-10
    max_iterations: int | None = None
    preconditioner: Preconditioner = "none"
    warm_start: bool = False

    def __post_init__(self):
        if not 0.0 < self.tolerance < 1.0:
            msg = f"solver tolerance must lie in (0, 1), got {self.tolerance}"
            raise ValueError(msg)
        if self.max_iterations is not None and self.max_iterations < 1:
            msg = f"max_iterations must be at least 1, got {self.max_iterations}"
            raise ValueError(msg)
        if self.preconditioner not in ("none", "jacobi"):
            msg = f"unknown preconditioner {self.preconditioner!r}"
            raise ValueError(msg)

    def iteration_cap(self, n: int) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return DEFAULT_ITERATIONS_PER_UNKNOWN * n


@dataclass(frozen=True)
class CGResult:
    solution: np.ndarray
    iterations: int
    residual: float


def conjugate_gradient(
    matrix: sparse.spmatrix,
    rhs: np.ndarray,
    config: SolverConfig | None = None,
    initial_guess: np.ndarray | None = None,
) -> CGResult:
    """Solve an SPD system with (optionally Jacobi-preconditioned) conjugate gradients.

    Convergence is declared when the recursively updated residual meets the
    tolerance and the recomputed true residual confirms it.

    Args:
        matrix: Symmetric positive definite matrix, shape (n, n)
        rhs: Right-hand side, shape (n,)
        config: Solver settings (defaults if omitted)
        initial_guess: Starting iterate, zero if omitted

    Returns:
        CGResult with the solution, iteration count and final relative residual

    Raises:
        ValueError: If dimensions disagree
        ConvergenceError: If the iteration cap is reached first
    """
    config = config or SolverConfig()
    n = matrix.shape[0]
    if matrix.shape != (n, n) or rhs.shape != (n,):
        msg = f"matrix {matrix.shape} and right-hand side {rhs.shape} are incompatible"
        raise ValueError(msg)

    rhs_norm = float(np.linalg.norm(rhs))
    if rhs_norm == 0.0:
        return CGResult(solution=np.zeros(n), iterations=0, residual=0.0)

    if config.preconditioner == "jacobi":
        inverse_diagonal = 1.0 / matrix.diagonal()
    else:
        inverse_diagonal = None

    def precondition(residual: np.ndarray) -> np.ndarray:
        if inverse_diagonal is None:
            return residual
        return inverse_diagonal * residual

    x = np.zeros(n) if initial_guess is None else np.array(initial_guess, dtype=float)
    r = rhs - matrix @ x
    z = precondition(r)
    p = z.copy()
    rz = float(r @ z)
    threshold = config.tolerance * rhs_norm
    cap = config.iteration_cap(n)

    iterations = 0
    residual_norm = float(np.linalg.norm(r))
    while residual_norm > threshold:
        if iterations >= cap:
            relative = residual_norm / rhs_norm
            logger.warning(
                "conjugate gradients did not converge",
                iterations=iterations,
                residual=relative,
                tolerance=config.tolerance,
            )
            msg = (
                f"conjugate gradients stopped after {iterations} iterations "
                f"at relative residual {relative:.3e} (tolerance {config.tolerance:.1e})"
            )
            raise ConvergenceError(msg, residual=relative, iterations=iterations)

        q = matrix @ p
        alpha = rz / float(p @ q)
        x += alpha * p
        iterations += 1

        if iterations % RESIDUAL_REFRESH_INTERVAL == 0:
            r = rhs - matrix @ x
        else:
            r -= alpha * q
        residual_norm = float(np.linalg.norm(r))

        if residual_norm <= threshold:
            # Confirm against the true residual; restart from it if they disagree.
            r = rhs - matrix @ x
            residual_norm = float(np.linalg.norm(r))
            if residual_norm > threshold:
                z = precondition(r)
                p = z.copy()
                rz = float(r @ z)
            continue

        z = precondition(r)
        rz_next = float(r @ z)
        p = z + (rz_next / rz) * p
        rz = rz_next

    logger.debug(
        "conjugate gradients converged",
        iterations=iterations,
        residual=residual_norm / rhs_norm,
    )
    return CGResult(solution=x, iterations=iterations, residual=residual_norm / rhs_norm)


def solve_spd(
    matrix: sparse.spmatrix,
    rhs: np.ndarray,
    config: SolverConfig | None = None,
    initial_guess: np.ndarray | None = None,
) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` and return only the solution vector."""
    return conjugate_gradient(matrix, rhs, config, initial_guess).solution
