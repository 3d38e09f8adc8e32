"""Monte Carlo strong-error studies over mesh refinement and rate fits."""

import asyncio
import contextvars
import functools
import os
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import TypeVar

import numpy as np
import structlog
from tqdm import tqdm

from spheregrf.analysis.error import lifted_l2_error
from spheregrf.mesh.quadrature import LiftedQuadrature
from spheregrf.mesh.sphere import MAX_LEVEL, icosphere, mesh_size
from spheregrf.sampling.fractional import FieldSampler, ModelParams, sample_rng
from spheregrf.sampling.noise import NoiseProjector, interpolate_noise, sample_white_noise
from spheregrf.sfem.solver import SolverConfig

logger = structlog.get_logger()

MIN_DATA_POINTS = 2
ERROR_QUADRATURE_ORDER = 5

T = TypeVar("T")


@dataclass(frozen=True)
class ConvergenceRow:
    """Strong error estimate on one refinement level.

    ``pairwise_rate`` is log2(e_prev / e) against the previous (coarser) row
    and is None on the first row.
    """

    level: int
    h_inball: float
    h_diam: float
    n_vertices: int
    strong_error: float
    pairwise_rate: float | None = None
    standard_error: float | None = None


@dataclass(frozen=True)
class NoiseRow:
    """RMS lifted L2 error of both noise transfers on one refinement level."""

    level: int
    h_inball: float
    h_diam: float
    n_vertices: int
    interpolation_error: float
    projection_error: float


async def _run_task_async(
    task: Callable[[int], T],
    index: int,
    semaphore: asyncio.Semaphore,
    pbar: tqdm,
) -> T:
    async with semaphore:
        loop = asyncio.get_running_loop()
        # executor threads start from an empty context unless it is copied
        context = contextvars.copy_context()
        result = await loop.run_in_executor(None, functools.partial(context.run, task, index))
        pbar.update(1)
        return result


async def _run_samples_async(
    task: Callable[[int], T],
    n_samples: int,
    max_concurrent: int,
    description: str,
    show_progress: bool,
) -> list[T]:
    semaphore = asyncio.Semaphore(max_concurrent)
    with tqdm(
        total=n_samples, desc=description, unit="sample", disable=not show_progress
    ) as pbar:
        tasks = [_run_task_async(task, index, semaphore, pbar) for index in range(n_samples)]
        # gather keeps submission order, so results never depend on scheduling
        return await asyncio.gather(*tasks)


def run_samples(
    task: Callable[[int], T],
    n_samples: int,
    workers: int | None = None,
    description: str = "Sampling",
    show_progress: bool = False,
) -> list[T]:
    """Evaluate ``task(i)`` for i = 0..n_samples-1 with bounded concurrency.

    Any failing sample aborts the whole batch.

    Args:
        task: Work for one sample index
        n_samples: Number of samples
        workers: Maximum concurrent samples (default: CPU count)
        description: Progress bar label
        show_progress: Display a tqdm progress bar

    Returns:
        Results in sample-index order
    """
    if workers is None:
        workers = os.cpu_count() or 1
    if workers < 1:
        msg = f"workers must be at least 1, got {workers}"
        raise ValueError(msg)
    return asyncio.run(_run_samples_async(task, n_samples, workers, description, show_progress))


def _check_levels(levels: Sequence[int]) -> None:
    if len(levels) == 0:
        msg = "at least one refinement level is required"
        raise ValueError(msg)
    if any(fine <= coarse for coarse, fine in zip(levels, levels[1:])):
        msg = f"levels must be strictly ascending, got {list(levels)}"
        raise ValueError(msg)
    if levels[0] < 0 or levels[-1] > MAX_LEVEL:
        msg = f"levels must lie in 0..{MAX_LEVEL}, got {list(levels)}"
        raise ValueError(msg)


def _check_samples(n_samples: int) -> None:
    if n_samples < 1:
        msg = f"n_samples must be at least 1, got {n_samples}"
        raise ValueError(msg)


def root_mean_square(errors: Sequence[float]) -> float:
    """sqrt of the mean squared error, accumulated in sample order."""
    squares = np.asarray(errors, dtype=float) ** 2
    return float(np.sqrt(np.mean(squares)))


def rms_standard_error(errors: Sequence[float]) -> float | None:
    """Delta-method standard error of the RMS estimate; None below two samples."""
    if len(errors) < MIN_DATA_POINTS:
        return None
    squares = np.asarray(errors, dtype=float) ** 2
    rms = float(np.sqrt(np.mean(squares)))
    if rms == 0.0:
        return 0.0
    return float(np.std(squares, ddof=1) / np.sqrt(len(squares)) / (2.0 * rms))


def pairwise_rates(errors: Sequence[float]) -> list[float | None]:
    """log2(e_{i-1} / e_i) for every entry after the first."""
    rates: list[float | None] = [None]
    for coarse, fine in zip(errors, errors[1:]):
        rates.append(float(np.log2(coarse / fine)) if coarse > 0 and fine > 0 else None)
    return rates


def fit_slope(h: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(h).

    Raises:
        ValueError: With fewer than two points, identical h values, or
            nonpositive entries
    """
    h = np.asarray(h, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(h) < MIN_DATA_POINTS:
        msg = f"rate fit needs at least {MIN_DATA_POINTS} points, got {len(h)}"
        raise ValueError(msg)
    if np.any(h <= 0) or np.any(errors <= 0):
        msg = "rate fit needs positive mesh sizes and errors"
        raise ValueError(msg)
    if np.ptp(h) == 0:
        msg = "rate fit needs distinct mesh sizes"
        raise ValueError(msg)
    return float(np.polyfit(np.log(h), np.log(errors), 1)[0])


def fit_exponential_slope(ks: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against 1/k for a sinc step sweep."""
    ks = np.asarray(ks, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(ks) < MIN_DATA_POINTS:
        msg = f"slope fit needs at least {MIN_DATA_POINTS} points, got {len(ks)}"
        raise ValueError(msg)
    if np.any(ks <= 0) or np.any(errors <= 0):
        msg = "slope fit needs positive steps and errors"
        raise ValueError(msg)
    if np.ptp(ks) == 0:
        msg = "slope fit needs distinct steps"
        raise ValueError(msg)
    return float(np.polyfit(1.0 / ks, np.log(errors), 1)[0])


def fit_rate(rows: Sequence[ConvergenceRow]) -> float:
    """Convergence order in h_inball fitted over all rows."""
    return fit_slope([row.h_inball for row in rows], [row.strong_error for row in rows])


def sample_errors(
    sampler: FieldSampler,
    n_samples: int,
    base_seed: int,
    workers: int | None = None,
    show_progress: bool = False,
) -> list[float]:
    """Lifted L2 error of samples 0..n_samples-1 on the sampler's mesh."""
    _check_samples(n_samples)
    mesh = sampler.mesh
    quadrature = LiftedQuadrature.build(mesh, ERROR_QUADRATURE_ORDER)

    def sample_error(index: int) -> float:
        sample = sampler.sample(index, base_seed)
        return lifted_l2_error(mesh, sample.fem, sample.spectral, quadrature=quadrature)

    return run_samples(
        sample_error,
        n_samples,
        workers,
        description=f"level {mesh.level}",
        show_progress=show_progress,
    )


def monte_carlo_strong_error(
    params: ModelParams,
    levels: Sequence[int],
    n_samples: int,
    base_seed: int,
    workers: int | None = None,
    show_progress: bool = False,
) -> list[ConvergenceRow]:
    """Estimate ||u_L - u_{L,h}|| in L2(Omega; L2(S^2)) on each level.

    Sample i uses the noise seeded by (base_seed, i) on every level, so the
    levels share their random numbers.

    Args:
        params: Field model
        levels: Strictly ascending icosphere levels
        n_samples: Monte Carlo samples per level, >= 1
        base_seed: Study seed
        workers: Maximum concurrent samples
        show_progress: Display progress bars

    Returns:
        One ConvergenceRow per level, coarse to fine
    """
    _check_levels(levels)
    _check_samples(n_samples)

    logger.info(
        "starting strong error study",
        beta=params.beta,
        kappa=params.kappa,
        k=params.step,
        L=params.degree,
        levels=list(levels),
        samples=n_samples,
        noise_mode=str(params.noise_mode),
    )

    estimates = []
    for level in levels:
        mesh = icosphere(level)
        errors = sample_errors(
            FieldSampler(mesh, params),
            n_samples,
            base_seed,
            workers=workers,
            show_progress=show_progress,
        )
        size = mesh_size(mesh)
        estimates.append((level, size, mesh.n_vertices, errors))
        logger.info(
            "level finished",
            level=level,
            vertices=mesh.n_vertices,
            h_inball=size.h_inball,
            strong_error=root_mean_square(errors),
        )

    strong = [root_mean_square(errors) for *_, errors in estimates]
    rates = pairwise_rates(strong)
    return [
        ConvergenceRow(
            level=level,
            h_inball=size.h_inball,
            h_diam=size.h_diam,
            n_vertices=n_vertices,
            strong_error=error,
            pairwise_rate=rate,
            standard_error=rms_standard_error(errors),
        )
        for (level, size, n_vertices, errors), error, rate in zip(estimates, strong, rates)
    ]


def noise_transfer_study(
    degree: int,
    levels: Sequence[int],
    n_samples: int,
    base_seed: int,
    order: int = 5,
    solver: SolverConfig | None = None,
    workers: int | None = None,
    show_progress: bool = False,
) -> list[NoiseRow]:
    """Compare interpolated and projected white noise against the exact W_L.

    Args:
        degree: Noise truncation degree L
        levels: Strictly ascending icosphere levels
        n_samples: Monte Carlo samples per level
        base_seed: Study seed
        order: Lifted quadrature order of the projection (2 or 5)
        solver: Settings for the Gram solves
        workers: Maximum concurrent samples
        show_progress: Display progress bars

    Returns:
        One NoiseRow per level with RMS errors of both transfers
    """
    _check_levels(levels)
    _check_samples(n_samples)
    solver = solver or SolverConfig()

    rows = []
    for level in levels:
        mesh = icosphere(level)
        projector = NoiseProjector(mesh, order, solver)
        quadrature = LiftedQuadrature.build(mesh, ERROR_QUADRATURE_ORDER)

        def transfer_errors(index: int, mesh=mesh, projector=projector, quadrature=quadrature):
            noise = sample_white_noise(degree, sample_rng(base_seed, index))
            return (
                lifted_l2_error(mesh, interpolate_noise(noise, mesh), noise, quadrature=quadrature),
                lifted_l2_error(mesh, projector.project(noise), noise, quadrature=quadrature),
            )

        errors = run_samples(
            transfer_errors,
            n_samples,
            workers,
            description=f"level {level}",
            show_progress=show_progress,
        )
        size = mesh_size(mesh)
        row = NoiseRow(
            level=level,
            h_inball=size.h_inball,
            h_diam=size.h_diam,
            n_vertices=mesh.n_vertices,
            interpolation_error=root_mean_square([pair[0] for pair in errors]),
            projection_error=root_mean_square([pair[1] for pair in errors]),
        )
        logger.info(
            "noise level finished",
            level=level,
            interpolation_error=row.interpolation_error,
            projection_error=row.projection_error,
        )
        rows.append(row)
    return rows


def summarize_convergence(rows: Sequence[ConvergenceRow]) -> dict[str, float]:
    """Summary metrics of a strong error study.

    Args:
        rows: Study rows, coarse to fine

    Returns:
        Dictionary with the fitted rate (when at least two levels ran), the
        last pairwise rate and the coarsest and finest errors
    """
    summary = {
        "coarsest_error": rows[0].strong_error,
        "finest_error": rows[-1].strong_error,
    }
    if len(rows) >= MIN_DATA_POINTS:
        summary["fitted_rate"] = fit_rate(rows)
        if rows[-1].pairwise_rate is not None:
            summary["last_pairwise_rate"] = rows[-1].pairwise_rate
    return summary
