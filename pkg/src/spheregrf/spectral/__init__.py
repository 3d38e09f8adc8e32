"""Spherical harmonics, sinc quadrature and the exact spectral oracle."""

from spheregrf.spectral.harmonics import (
    HarmonicCoeffs,
    eigenvalue,
    eigenvalues,
    eval_expansion,
    eval_real_sh,
    real_sh_matrix,
)
from spheregrf.spectral.oracle import (
    expected_field_norm,
    quadrature_error_curve,
    sinc_factor,
    spectral_factor,
    spectral_sinc_apply,
    spectral_solution,
    tail_integral,
    truncation_error,
)
from spheregrf.spectral.sinc import SincQuadrature, sinc_nodes, split_beta

__all__ = [
    "HarmonicCoeffs",
    "SincQuadrature",
    "eigenvalue",
    "eigenvalues",
    "eval_expansion",
    "eval_real_sh",
    "expected_field_norm",
    "quadrature_error_curve",
    "real_sh_matrix",
    "sinc_factor",
    "sinc_nodes",
    "spectral_factor",
    "spectral_sinc_apply",
    "spectral_solution",
    "split_beta",
    "tail_integral",
    "truncation_error",
]
