"""Sinc quadrature of the Dunford-Taylor integral for negative fractional powers."""

import math
from dataclasses import dataclass

import numpy as np

# |beta - round(beta)| below this takes the integer-power path.
INTEGER_TOLERANCE = 1e-12


def split_beta(beta: float) -> tuple[int, float]:
    """Split beta into its integer part and fractional part in [0, 1).

    Values within 1e-12 of an integer return a fractional part of exactly 0.
    """
    nearest = round(beta)
    if abs(beta - nearest) < INTEGER_TOLERANCE:
        return int(nearest), 0.0
    floor = math.floor(beta)
    return floor, beta - floor


@dataclass(frozen=True)
class SincQuadrature:
    """Equispaced nodes y = k*l, l = -n_negative..n_positive, with positive weights.

    Attributes:
        step: Node spacing k
        fraction: Fractional exponent in (0, 1)
        n_positive: K+ = ceil(pi^2 / (4 (1 - fraction) k^2))
        n_negative: K- = ceil(pi^2 / (4 fraction k^2))
    """

    step: float
    fraction: float
    n_positive: int
    n_negative: int

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.n_negative, self.n_positive + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.step * self.indices

    @property
    def n_nodes(self) -> int:
        return self.n_positive + self.n_negative + 1

    @property
    def prefactor(self) -> float:
        return 2.0 * self.step * math.sin(math.pi * self.fraction) / math.pi

    @property
    def weights(self) -> np.ndarray:
        return self.prefactor * np.exp(2.0 * self.fraction * self.nodes)

    def factor(self, mu: np.ndarray) -> np.ndarray:
        """Approximate mu^(-fraction) for positive ``mu``.

        Each term e^(2 f y) / (1 + e^(2y) mu) is evaluated in log space, and the
        terms are summed from the most negative node upward.
        """
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        log_terms = 2.0 * self.fraction * self.nodes[np.newaxis, :] - np.logaddexp(
            0.0, 2.0 * self.nodes[np.newaxis, :] + np.log(mu)[:, np.newaxis]
        )
        return self.prefactor * np.cumsum(np.exp(log_terms), axis=1)[:, -1]


def sinc_nodes(beta_frac: float, k: float) -> SincQuadrature:
    """Build the sinc rule for the fractional exponent ``beta_frac``.

    Args:
        beta_frac: Fractional part of beta, strictly between 0 and 1
        k: Node spacing, > 0

    Returns:
        SincQuadrature with K+ and K- balancing the truncation errors at both ends

    Raises:
        ValueError: If beta_frac is 0 or 1 (integer exponents bypass quadrature)
            or k is not positive
    """
    if not 0.0 < beta_frac < 1.0:
        msg = (
            f"fractional exponent must lie strictly between 0 and 1, got {beta_frac}; "
            "integer exponents bypass the sinc quadrature"
        )
        raise ValueError(msg)
    if k <= 0:
        msg = f"quadrature step k must be positive, got {k}"
        raise ValueError(msg)

    scale = math.pi**2 / (4.0 * k * k)
    return SincQuadrature(
        step=float(k),
        fraction=float(beta_frac),
        n_positive=math.ceil(scale / (1.0 - beta_frac)),
        n_negative=math.ceil(scale / beta_frac),
    )
