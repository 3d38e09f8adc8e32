"""Real orthonormal spherical harmonics and truncated expansions."""

from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

UNIT_NORM_TOLERANCE = 1e-10


def eigenvalue(degree: int) -> float:
    """Laplace-Beltrami eigenvalue l(l+1) of degree ``degree`` (sign dropped)."""
    if degree < 0:
        msg = f"degree must be nonnegative, got {degree}"
        raise ValueError(msg)
    return float(degree * (degree + 1))


def eigenvalues(degree: int) -> np.ndarray:
    """Eigenvalue of every coefficient slot up to ``degree``, in storage order."""
    degrees = np.arange(degree + 1)
    return np.repeat(degrees * (degrees + 1.0), coefficient_counts(degree))


def coefficient_counts(degree: int) -> np.ndarray:
    return 2 * np.arange(degree + 1) + 1


@dataclass(frozen=True, eq=False)
class HarmonicCoeffs:
    """Coefficients a_{l,m}, l = 0..degree, m = -l..l, stored at index l*l + l + m.

    Attributes:
        degree: Truncation degree L
        values: Real coefficients, shape ((L+1)**2,)
    """

    degree: int
    values: np.ndarray

    def __post_init__(self):
        if self.degree < 0:
            msg = f"degree must be nonnegative, got {self.degree}"
            raise ValueError(msg)
        expected = (self.degree + 1) ** 2
        if self.values.shape != (expected,):
            msg = (
                f"expected {expected} coefficients for degree {self.degree}, "
                f"got {self.values.shape}"
            )
            raise ValueError(msg)
        if not np.all(np.isfinite(self.values)):
            msg = "harmonic coefficients must be finite"
            raise ValueError(msg)

    @staticmethod
    def index(degree: int, order: int) -> int:
        return degree * degree + degree + order

    @classmethod
    def zeros(cls, degree: int) -> "HarmonicCoeffs":
        return cls(degree, np.zeros((degree + 1) ** 2))

    @classmethod
    def unit(cls, degree: int, l: int, m: int) -> "HarmonicCoeffs":  # noqa: E741
        """Coefficient vector selecting the single harmonic Y_{l,m}."""
        _check_index(l, m)
        if l > degree:
            msg = f"harmonic degree {l} exceeds the truncation degree {degree}"
            raise ValueError(msg)
        values = np.zeros((degree + 1) ** 2)
        values[cls.index(l, m)] = 1.0
        return cls(degree, values)

    def degrees(self) -> np.ndarray:
        """Degree l of every stored coefficient."""
        return np.repeat(np.arange(self.degree + 1), coefficient_counts(self.degree))

    def scale_by_degree(self, factors: np.ndarray) -> "HarmonicCoeffs":
        """Multiply every a_{l,m} by ``factors[l]``."""
        factors = np.asarray(factors, dtype=float)
        if factors.shape != (self.degree + 1,):
            msg = f"expected {self.degree + 1} per-degree factors, got {factors.shape}"
            raise ValueError(msg)
        return HarmonicCoeffs(self.degree, self.values * factors[self.degrees()])

    def norm_squared(self) -> float:
        """Squared L2(S^2) norm of the expansion (Parseval)."""
        return float(self.values @ self.values)


def _check_index(l: int, m: int) -> None:  # noqa: E741
    if l < 0 or abs(m) > l:
        msg = f"invalid spherical harmonic index (l={l}, m={m})"
        raise ValueError(msg)


def _check_unit(points: np.ndarray) -> None:
    norms = np.linalg.norm(points, axis=-1)
    if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOLERANCE):
        msg = "points must lie on the unit sphere"
        raise ValueError(msg)


def _legendre_by_order(
    degree: int, z: np.ndarray, s: np.ndarray
) -> Iterator[tuple[int, Iterator[tuple[int, np.ndarray]]]]:
    """Fully normalized associated Legendre functions, order-outer.

    For each order m yields m and an iterator over (l, P_lm(z)) for l = m..degree,
    normalized so that P_lm(cos theta) * trig(m phi) has unit L2 norm up to the
    sqrt(2) of the real basis. No Condon-Shortley phase.
    """
    diagonal = np.full_like(z, 1.0 / np.sqrt(4.0 * np.pi))
    for m in range(degree + 1):
        if m > 0:
            diagonal = diagonal * np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s
        yield m, _legendre_column(degree, m, z, diagonal)


def _legendre_column(
    degree: int, m: int, z: np.ndarray, diagonal: np.ndarray
) -> Iterator[tuple[int, np.ndarray]]:
    previous, current = None, diagonal
    yield m, current
    for l in range(m + 1, degree + 1):  # noqa: E741
        a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
        following = a * z * current
        if previous is not None:
            b = np.sqrt(
                ((2.0 * l + 1.0) * ((l - 1.0) ** 2 - m * m))
                / ((2.0 * l - 3.0) * (l * l - m * m))
            )
            following = following - b * previous
        previous, current = current, following
        yield l, current


def _spherical_coordinates(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # azimuth is 0 at the poles, where only m = 0 terms survive
    x, y, z = points[..., 0], points[..., 1], points[..., 2]
    return z, np.hypot(x, y), np.arctan2(y, x)


def _harmonic_terms(degree: int, points: np.ndarray) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (storage index, Y_lm at points) for every harmonic up to ``degree``."""
    z, s, phi = _spherical_coordinates(points)
    for m, column in _legendre_by_order(degree, z, s):
        if m == 0:
            for l, legendre in column:  # noqa: E741
                yield HarmonicCoeffs.index(l, 0), legendre
            continue
        cosine = np.sqrt(2.0) * np.cos(m * phi)
        sine = np.sqrt(2.0) * np.sin(m * phi)
        for l, legendre in column:  # noqa: E741
            yield HarmonicCoeffs.index(l, m), legendre * cosine
            yield HarmonicCoeffs.index(l, -m), legendre * sine


def eval_real_sh(l: int, m: int, point: np.ndarray) -> float:  # noqa: E741
    """Evaluate the real orthonormal harmonic Y_{l,m} at a unit point.

    Args:
        l: Degree, >= 0
        m: Order, |m| <= l; negative orders select the sine harmonics
        point: Unit vector of shape (3,)

    Returns:
        Y_{l,m}(point)

    Raises:
        ValueError: If the index is out of range or the point is not unit-norm
    """
    _check_index(l, m)
    point = np.asarray(point, dtype=float).reshape(1, 3)
    _check_unit(point)
    return float(eval_expansion(HarmonicCoeffs.unit(l, l, m), point)[0])


def real_sh_matrix(degree: int, points: np.ndarray) -> np.ndarray:
    """Tabulate every harmonic up to ``degree`` at ``points``.

    Returns:
        Array of shape (n_points, (degree+1)**2) in coefficient storage order
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    _check_unit(points)
    table = np.empty((len(points), (degree + 1) ** 2))
    for index, values in _harmonic_terms(degree, points):
        table[:, index] = values
    return table


def eval_expansion(coeffs: HarmonicCoeffs, points: np.ndarray) -> np.ndarray:
    """Evaluate sum_{l,m} a_{l,m} Y_{l,m} at unit points.

    Memory stays linear in the number of points for any degree.

    Args:
        coeffs: Expansion coefficients
        points: Unit vectors, shape (n, 3)

    Returns:
        Values of shape (n,)
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    _check_unit(points)
    total = np.zeros(len(points))
    for index, values in _harmonic_terms(coeffs.degree, points):
        coefficient = coeffs.values[index]
        if coefficient != 0.0:
            total += coefficient * values
    return total
