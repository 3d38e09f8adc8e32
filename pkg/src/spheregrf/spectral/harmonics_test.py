"""Tests for real spherical harmonics."""

import numpy as np
import pytest

from spheregrf.mesh.quadrature import LiftedQuadrature
from spheregrf.mesh.sphere import icosphere
from spheregrf.spectral.harmonics import (
    HarmonicCoeffs,
    eigenvalue,
    eval_expansion,
    eval_real_sh,
    real_sh_matrix,
)


def _random_unit_points(n: int, seed: int) -> np.ndarray:
    points = np.random.default_rng(seed).standard_normal((n, 3))
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def _closed_form(l: int, m: int, point: np.ndarray) -> float:  # noqa: E741
    """Textbook real harmonics up to degree 2."""
    x, y, z = point
    table = {
        (0, 0): 0.5 / np.sqrt(np.pi),
        (1, -1): np.sqrt(3.0 / (4.0 * np.pi)) * y,
        (1, 0): np.sqrt(3.0 / (4.0 * np.pi)) * z,
        (1, 1): np.sqrt(3.0 / (4.0 * np.pi)) * x,
        (2, -2): 0.5 * np.sqrt(15.0 / np.pi) * x * y,
        (2, -1): 0.5 * np.sqrt(15.0 / np.pi) * y * z,
        (2, 0): 0.25 * np.sqrt(5.0 / np.pi) * (3.0 * z * z - 1.0),
        (2, 1): 0.5 * np.sqrt(15.0 / np.pi) * x * z,
        (2, 2): 0.25 * np.sqrt(15.0 / np.pi) * (x * x - y * y),
    }
    return table[(l, m)]


@pytest.mark.parametrize(("degree", "expected"), [(0, 0.0), (1, 2.0), (10, 110.0)])
def test_eigenvalue(degree, expected):
    """Returns l(l+1)."""
    assert eigenvalue(degree) == expected


def test_constant_harmonic():
    """Evaluates Y_00 to 1/(2 sqrt(pi)) everywhere."""
    for point in _random_unit_points(5, seed=0):
        assert eval_real_sh(0, 0, point) == pytest.approx(0.2820948, abs=1e-7)


def test_zonal_degree_one_at_north_pole():
    """Evaluates Y_10 at the north pole to sqrt(3/(4 pi))."""
    assert eval_real_sh(1, 0, np.array([0.0, 0.0, 1.0])) == pytest.approx(0.4886025, abs=1e-7)


def test_matches_closed_forms_up_to_degree_two():
    """Agrees with the Cartesian closed forms of the real basis."""
    for point in _random_unit_points(20, seed=1):
        for l in range(3):  # noqa: E741
            for m in range(-l, l + 1):
                assert eval_real_sh(l, m, point) == pytest.approx(
                    _closed_form(l, m, point), abs=1e-13
                )


def test_rejects_invalid_index():
    """Raises ValueError when |m| > l."""
    with pytest.raises(ValueError, match="invalid spherical harmonic index"):
        eval_real_sh(1, 2, np.array([0.0, 0.0, 1.0]))


def test_rejects_non_unit_point():
    """Raises ValueError for points off the sphere."""
    with pytest.raises(ValueError, match="unit sphere"):
        eval_real_sh(1, 0, np.array([0.0, 0.0, 1.1]))


def test_gram_matrix_is_identity_under_lifted_quadrature():
    """Integrates products of harmonics up to degree 3 to the identity within 1e-3."""
    quadrature = LiftedQuadrature.build(icosphere(5), 5)
    table = real_sh_matrix(3, quadrature.lifted_points)

    gram = table.T @ (quadrature.weights[:, np.newaxis] * table)

    assert np.max(np.abs(gram - np.eye(16))) <= 1e-3


def test_parseval_on_fine_mesh():
    """Matches the quadrature L2 norm to the coefficient norm within 1e-3."""
    quadrature = LiftedQuadrature.build(icosphere(5), 5)
    coeffs = HarmonicCoeffs(5, np.random.default_rng(2).standard_normal(36))

    values = eval_expansion(coeffs, quadrature.lifted_points)

    assert quadrature.integrate(values**2) == pytest.approx(coeffs.norm_squared(), rel=1e-3)


def test_unit_coefficients_give_constant():
    """Evaluates e_00 to the constant harmonic."""
    values = eval_expansion(HarmonicCoeffs.unit(3, 0, 0), _random_unit_points(10, seed=3))

    assert np.allclose(values, 1.0 / (2.0 * np.sqrt(np.pi)), atol=1e-15)


def test_expansion_is_linear():
    """Evaluates alpha*c1 + c2 to alpha*eval(c1) + eval(c2)."""
    rng = np.random.default_rng(4)
    points = _random_unit_points(50, seed=5)
    first = HarmonicCoeffs(4, rng.standard_normal(25))
    second = HarmonicCoeffs(4, rng.standard_normal(25))
    alpha = 1.7

    combined = eval_expansion(HarmonicCoeffs(4, alpha * first.values + second.values), points)

    expected = alpha * eval_expansion(first, points) + eval_expansion(second, points)
    assert np.allclose(combined, expected, atol=1e-12)


def test_expansion_matches_term_by_term_sum():
    """Equals the naive sum of a_lm Y_lm to 1e-13 for degree 2."""
    coeffs = HarmonicCoeffs(2, np.random.default_rng(6).standard_normal(9))
    points = _random_unit_points(10, seed=7)

    values = eval_expansion(coeffs, points)

    for point, value in zip(points, values):
        naive = sum(
            coeffs.values[HarmonicCoeffs.index(l, m)] * _closed_form(l, m, point)
            for l in range(3)  # noqa: E741
            for m in range(-l, l + 1)
        )
        assert value == pytest.approx(naive, abs=1e-13)


def test_matrix_and_expansion_agree():
    """Tabulates the same values the expansion sums."""
    coeffs = HarmonicCoeffs(6, np.random.default_rng(8).standard_normal(49))
    points = _random_unit_points(30, seed=9)

    assert np.allclose(real_sh_matrix(6, points) @ coeffs.values, eval_expansion(coeffs, points))


@pytest.mark.parametrize("degree", [1, 4, 9])
def test_degree_energy_is_rotation_invariant(degree):
    """Keeps sum_m Y_lm(x)^2 = (2l+1)/(4 pi) under rotations about z."""
    points = _random_unit_points(10, seed=10)
    angle = 0.83
    rotation = np.array(
        [[np.cos(angle), -np.sin(angle), 0.0], [np.sin(angle), np.cos(angle), 0.0], [0, 0, 1.0]]
    )
    start = degree * degree

    energy = np.sum(real_sh_matrix(degree, points)[:, start:] ** 2, axis=1)
    rotated = np.sum(real_sh_matrix(degree, points @ rotation.T)[:, start:] ** 2, axis=1)

    assert np.allclose(energy, rotated, atol=1e-12)
    assert np.allclose(energy, (2 * degree + 1) / (4.0 * np.pi), atol=1e-12)


def test_high_degree_values_stay_bounded():
    """Keeps |Y_lm| <= sqrt((2l+1)/(4 pi)) up to l = 200."""
    points = np.vstack([_random_unit_points(20, seed=11), [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]])
    degree = 200

    table = real_sh_matrix(degree, points)

    bounds = np.sqrt((2 * HarmonicCoeffs.zeros(degree).degrees() + 1) / (4.0 * np.pi))
    assert np.all(np.isfinite(table))
    assert np.all(np.abs(table) <= bounds * (1.0 + 1e-10))


def test_poles_keep_only_zonal_terms():
    """Vanishes for m != 0 at the poles."""
    table = real_sh_matrix(5, np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]))
    zonal = [HarmonicCoeffs.index(l, 0) for l in range(6)]  # noqa: E741

    nonzonal = np.delete(table, zonal, axis=1)

    assert np.all(nonzonal == 0.0)


def test_coefficients_reject_wrong_size():
    """Raises ValueError unless there are (L+1)^2 coefficients."""
    with pytest.raises(ValueError, match="expected 9 coefficients"):
        HarmonicCoeffs(2, np.zeros(8))


def test_coefficients_reject_non_finite_values():
    """Raises ValueError for NaN entries."""
    with pytest.raises(ValueError, match="finite"):
        HarmonicCoeffs(0, np.array([np.nan]))
