"""Exact spectral solutions, used as ground truth for every error measurement.

In the harmonic basis the operator (kappa^2 - Laplace-Beltrami) is diagonal with
entries mu_l = kappa^2 + l(l+1), so its powers act degree by degree.
"""

import numpy as np

from spheregrf.spectral.harmonics import HarmonicCoeffs
from spheregrf.spectral.sinc import sinc_nodes, split_beta

# Explicit terms before switching to the integral tail in truncation_error.
TRUNCATION_SUM_TERMS = 20_000


def _shifted_eigenvalues(kappa: float, degree: int) -> np.ndarray:
    degrees = np.arange(degree + 1, dtype=float)
    return kappa**2 + degrees * (degrees + 1.0)


def _check_kappa(kappa: float) -> None:
    if kappa <= 0:
        msg = f"kappa must be positive, got {kappa}"
        raise ValueError(msg)


def spectral_factor(beta: float, kappa: float, degree: int) -> np.ndarray:
    """Per-degree multiplier (kappa^2 + l(l+1))^(-beta) for l = 0..degree."""
    _check_kappa(kappa)
    return _shifted_eigenvalues(kappa, degree) ** (-beta)


def spectral_solution(coeffs: HarmonicCoeffs, beta: float, kappa: float) -> HarmonicCoeffs:
    """Apply (kappa^2 - Laplace-Beltrami)^(-beta) to a truncated expansion."""
    return coeffs.scale_by_degree(spectral_factor(beta, kappa, coeffs.degree))


def sinc_factor(beta: float, kappa: float, k: float, degree: int) -> np.ndarray:
    """Per-degree multiplier of the discrete pipeline without spatial error.

    The integer part of beta is applied exactly and the fractional part by
    sinc quadrature with step ``k``. Integer beta returns the exact power.
    """
    _check_kappa(kappa)
    floor, fraction = split_beta(beta)
    mu = _shifted_eigenvalues(kappa, degree)
    if fraction == 0.0:
        return mu ** (-float(floor))
    return mu ** (-float(floor)) * sinc_nodes(fraction, k).factor(mu)


def spectral_sinc_apply(
    coeffs: HarmonicCoeffs, beta: float, kappa: float, k: float
) -> HarmonicCoeffs:
    """Apply the recursion-plus-quadrature approximation of the fractional inverse."""
    return coeffs.scale_by_degree(sinc_factor(beta, kappa, k, coeffs.degree))


def quadrature_error_curve(
    beta: float, kappa: float, degree: int, ks: list[float]
) -> list[float]:
    """Maximum relative sinc-factor error over degrees 0..degree, for each step k.

    Raises:
        ValueError: If ``ks`` is empty or beta has no fractional part
    """
    if not ks:
        msg = "at least one quadrature step k is required"
        raise ValueError(msg)
    if split_beta(beta)[1] == 0.0:
        msg = f"beta={beta} is an integer, so the sinc quadrature is bypassed and exact"
        raise ValueError(msg)

    exact = spectral_factor(beta, kappa, degree)
    return [
        float(np.max(np.abs(sinc_factor(beta, kappa, k, degree) - exact) / exact)) for k in ks
    ]


def expected_field_norm(beta: float, kappa: float, degree: int) -> float:
    """E||u_L||^2 = sum over l <= L of (2l+1) (kappa^2 + l(l+1))^(-2 beta)."""
    multiplicities = 2.0 * np.arange(degree + 1) + 1.0
    return float(np.sum(multiplicities * spectral_factor(2.0 * beta, kappa, degree)))


def _integral_tail(beta: float, kappa: float, x: float) -> float:
    # (2x+1) is the derivative of kappa^2 + x(x+1), so the integrand has a closed primitive.
    return (kappa**2 + x * (x + 1.0)) ** (1.0 - 2.0 * beta) / (2.0 * beta - 1.0)


def _check_square_integrable(beta: float) -> None:
    if beta <= 0.5:
        msg = f"beta must exceed 1/2 for a square-integrable field, got {beta}"
        raise ValueError(msg)


def truncation_error(beta: float, kappa: float, degree: int) -> float:
    """RMS error ||u - u_L|| of truncating the exact field at degree L.

    Sums the degrees L+1..L+N explicitly and closes the remaining series
    with its midpoint integral approximation.
    """
    _check_kappa(kappa)
    _check_square_integrable(beta)
    degrees = np.arange(degree + 1, degree + TRUNCATION_SUM_TERMS + 1, dtype=float)
    terms = (2.0 * degrees + 1.0) * (kappa**2 + degrees * (degrees + 1.0)) ** (-2.0 * beta)
    tail = _integral_tail(beta, kappa, degrees[-1] + 0.5)
    return float(np.sqrt(np.sum(terms) + tail))


def tail_integral(beta: float, kappa: float, degree: int) -> float:
    """Integral comparison value sqrt(int_L^inf (2x+1) mu(x)^(-2 beta) dx)."""
    _check_kappa(kappa)
    _check_square_integrable(beta)
    return float(np.sqrt(_integral_tail(beta, kappa, float(degree))))
