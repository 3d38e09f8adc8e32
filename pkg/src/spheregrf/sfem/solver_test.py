"""Tests for the conjugate gradient solver."""

import itertools

import numpy as np
import pytest
from scipy import sparse

from spheregrf.mesh.sphere import icosphere
from spheregrf.sfem.assembly import FemOperators
from spheregrf.sfem.solver import (
    ConvergenceError,
    SolverConfig,
    conjugate_gradient,
    solve_spd,
)


def _random_spd(n: int, seed: int) -> np.ndarray:
    factor = np.random.default_rng(seed).standard_normal((n, n))
    return factor @ factor.T + n * np.eye(n)


def test_solves_diagonal_system():
    """Divides the right-hand side elementwise by the diagonal."""
    diagonal = np.array([1.0, 2.0, 4.0, 8.0])
    rhs = np.array([3.0, -2.0, 1.0, 0.5])

    solution = solve_spd(sparse.diags(diagonal).tocsr(), rhs)

    assert np.allclose(solution, rhs / diagonal, rtol=1e-12)


def test_matches_dense_factorization():
    """Agrees with a dense solve on a random 10x10 SPD system to 1e-8."""
    dense = _random_spd(10, seed=4)
    rhs = np.random.default_rng(5).standard_normal(10)

    solution = solve_spd(sparse.csr_matrix(dense), rhs)

    assert np.allclose(solution, np.linalg.solve(dense, rhs), atol=1e-8)


def test_zero_rhs_takes_no_iterations():
    """Returns zero without iterating when b = 0."""
    result = conjugate_gradient(sparse.eye(5, format="csr"), np.zeros(5))

    assert result.iterations == 0
    assert np.all(result.solution == 0.0)
    assert result.residual == 0.0


def test_reports_relative_residual_below_tolerance():
    """Meets the requested relative residual on the true residual."""
    operators = FemOperators.assemble(icosphere(3))
    matrix = operators.helmholtz(1.0, 1.0)
    rhs = np.random.default_rng(6).standard_normal(matrix.shape[0])

    result = conjugate_gradient(matrix, rhs, SolverConfig(tolerance=1e-10))

    true_residual = np.linalg.norm(matrix @ result.solution - rhs) / np.linalg.norm(rhs)
    assert result.residual <= 1e-10
    assert true_residual <= 1e-10


def test_raises_when_iteration_cap_is_hit():
    """Raises ConvergenceError carrying the final residual and iteration count."""
    dense = _random_spd(20, seed=7)
    rhs = np.ones(20)

    with pytest.raises(ConvergenceError) as exc_info:
        conjugate_gradient(sparse.csr_matrix(dense), rhs, SolverConfig(max_iterations=2))

    assert exc_info.value.iterations == 2
    assert exc_info.value.residual > 1e-10


def test_stage_is_prefixed_when_propagating():
    """Tags the error with outer stages in order."""
    error = ConvergenceError("stalled", residual=0.1, iterations=3)

    tagged = error.at_stage("sinc node -4").at_stage("sample 7")

    assert tagged.stage == "sample 7: sinc node -4"
    assert tagged.residual == 0.1
    assert tagged.iterations == 3
    assert "stalled" in str(tagged)


def test_jacobi_solves_diagonal_system_in_one_iteration():
    """Converges in one step when the Jacobi preconditioner is exact."""
    diagonal = np.logspace(-3, 3, 7)
    rhs = np.arange(1.0, 8.0)

    result = conjugate_gradient(
        sparse.diags(diagonal).tocsr(), rhs, SolverConfig(preconditioner="jacobi")
    )

    assert result.iterations == 1
    assert np.allclose(result.solution, rhs / diagonal, rtol=1e-12)


def test_jacobi_matches_unpreconditioned_solution():
    """Reaches the same solution with and without preconditioning."""
    operators = FemOperators.assemble(icosphere(2))
    matrix = operators.helmholtz(0.01, 1.0)
    rhs = operators.mass @ np.random.default_rng(8).standard_normal(matrix.shape[0])

    plain = solve_spd(matrix, rhs, SolverConfig(tolerance=1e-12))
    jacobi = solve_spd(matrix, rhs, SolverConfig(tolerance=1e-12, preconditioner="jacobi"))

    assert np.allclose(plain, jacobi, rtol=1e-8, atol=1e-10)


def test_initial_guess_at_solution_needs_no_iterations():
    """Stops immediately when started from the exact solution."""
    dense = _random_spd(6, seed=9)
    expected = np.arange(6.0)

    result = conjugate_gradient(
        sparse.csr_matrix(dense), dense @ expected, initial_guess=expected
    )

    assert result.iterations == 0


@pytest.mark.parametrize(
    ("c0", "c1"), list(itertools.product([1e-4, 1e-2, 1.0, 1e2, 1e4], repeat=2))
)
def test_converges_on_helmholtz_family(c0, c1):
    """Converges on c0*M + c1*S for coefficients spanning eight decades."""
    operators = FemOperators.assemble(icosphere(1))
    matrix = operators.helmholtz(c0, c1)
    rhs = operators.mass @ np.random.default_rng(10).standard_normal(matrix.shape[0])

    result = conjugate_gradient(
        matrix, rhs, SolverConfig(tolerance=1e-4, max_iterations=10_000)
    )

    true_residual = np.linalg.norm(matrix @ result.solution - rhs) / np.linalg.norm(rhs)
    assert true_residual <= 1e-4


def test_default_cap_scales_with_system_size():
    """Caps iterations at ten per unknown unless configured."""
    assert SolverConfig().iteration_cap(42) == 420
    assert SolverConfig(max_iterations=7).iteration_cap(42) == 7


@pytest.mark.parametrize(
    "kwargs",
    [{"tolerance": 0.0}, {"tolerance": 1.0}, {"max_iterations": 0}, {"preconditioner": "ilu"}],
)
def test_config_rejects_invalid_settings(kwargs):
    """Raises ValueError for out-of-range solver settings."""
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


def test_rejects_mismatched_dimensions():
    """Raises ValueError when b does not match the matrix size."""
    with pytest.raises(ValueError, match="incompatible"):
        solve_spd(sparse.eye(3, format="csr"), np.ones(4))
