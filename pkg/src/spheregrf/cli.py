"""CLI for sampling spherical Whittle-Matern fields and running error studies."""

import argparse
import sys
from pathlib import Path

import structlog
import yaml
from pydantic import ValidationError

from spheregrf.analysis.convergence import (
    MIN_DATA_POINTS,
    fit_exponential_slope,
    fit_slope,
    monte_carlo_strong_error,
    noise_transfer_study,
    run_samples,
    summarize_convergence,
)
from spheregrf.analysis.reporting import (
    create_report_directory,
    export_convergence,
    export_field,
    export_matrix_market,
    export_noise_study,
    export_quadrature_curve,
    export_summary_stats,
    export_truncation,
    write_vtk,
)
from spheregrf.config import ConfigError, RunConfig, load_config
from spheregrf.logging import bind_run_context, configure_logging
from spheregrf.mesh.sphere import icosphere
from spheregrf.sampling.fractional import FieldSampler, sample_rng
from spheregrf.sampling.noise import PROJECTION_ORDERS, sample_white_noise
from spheregrf.sfem.assembly import FemOperators
from spheregrf.sfem.solver import ConvergenceError
from spheregrf.spectral.oracle import quadrature_error_curve, tail_integral, truncation_error
from spheregrf.spectral.sinc import split_beta

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _tag(**values) -> str:
    return "_".join(f"{key}-{value:g}" for key, value in values.items())


def cmd_sample(
    config: RunConfig,
    output_dir: Path,
    workers: int | None = None,
    export_matrices: bool = False,
) -> list[Path]:
    """Sample one field per (beta, kappa, seed) on the finest configured level.

    Every seed draws its noise once, so fields for different beta and kappa
    with the same seed share W_L.

    Args:
        config: Run configuration
        output_dir: Base output directory
        workers: Maximum concurrent field solves
        export_matrices: Also write the mass and stiffness matrices

    Returns:
        Written VTK and CSV paths
    """
    config.require("sample")
    report_path = create_report_directory(output_dir, "sample")
    mesh = icosphere(config.levels[-1])
    operators = FemOperators.assemble(mesh)
    logger.info("sampling fields", mesh=mesh.summary(), seeds=config.seeds)

    noises = {seed: sample_white_noise(config.L, sample_rng(seed, 0)) for seed in config.seeds}
    jobs = [
        (beta, kappa, seed)
        for beta in config.betas
        for kappa in config.kappas
        for seed in config.seeds
    ]
    samplers = {
        (beta, kappa): FieldSampler(mesh, config.model_params(beta, kappa), operators)
        for beta in config.betas
        for kappa in config.kappas
    }

    def solve(index: int):
        beta, kappa, seed = jobs[index]
        sampler = samplers[beta, kappa]
        noise_field = sampler.noise_field(noises[seed])
        return noise_field, sampler.solve(noise_field)

    solved = run_samples(solve, len(jobs), workers, description="Fields")

    written = []
    for (beta, kappa, seed), (noise_field, field) in zip(jobs, solved):
        stem = f"field_{_tag(beta=beta, kappa=kappa)}_seed-{seed}"
        written.append(
            write_vtk(
                mesh,
                report_path / f"{stem}.vtk",
                {"field": field.values, "noise": noise_field.values},
                title=f"sphere-grf beta={beta:g} kappa={kappa:g} seed={seed} L={config.L}",
            )
        )
        written.append(export_field(field, report_path / f"{stem}.csv"))

    if export_matrices:
        written.extend(export_matrix_market(operators, report_path / "matrices"))

    logger.info("fields written", count=len(jobs), directory=str(report_path))
    return written


def cmd_convergence(
    config: RunConfig,
    output_dir: Path,
    workers: int | None = None,
    show_progress: bool = False,
) -> list[Path]:
    """Run one strong error study per (beta, kappa) pair.

    Returns:
        Written study and summary CSV paths
    """
    config.require("convergence")
    seed = config.study_seed()
    report_path = create_report_directory(output_dir, "convergence")

    written = []
    for beta in config.betas:
        for kappa in config.kappas:
            rows = monte_carlo_strong_error(
                config.model_params(beta, kappa),
                config.levels,
                config.samples,
                seed,
                workers=workers,
                show_progress=show_progress,
            )
            stem = _tag(beta=beta, kappa=kappa)
            study = {
                "beta": beta,
                "kappa": kappa,
                "k": config.k,
                "L": config.L,
                "n_samples": config.samples,
            }
            written.append(export_convergence(rows, study, report_path / f"{stem}.csv"))

            summary = summarize_convergence(rows)
            written.append(export_summary_stats(summary, report_path / f"{stem}_summary.csv"))
            logger.info(
                "convergence study finished",
                beta=beta,
                kappa=kappa,
                fitted_rate=summary.get("fitted_rate"),
                last_pairwise_rate=summary.get("last_pairwise_rate"),
            )
    return written


def cmd_quadrature_study(config: RunConfig, output_dir: Path) -> list[Path]:
    """Measure the sinc factor error over the configured steps for each (beta, kappa).

    Raises:
        ConfigError: If ``ks`` is empty or some beta has no fractional part
    """
    config.require("quadrature-study")
    if not config.ks:
        msg = "ks must list at least one quadrature step"
        raise ConfigError(msg)
    for beta in config.betas:
        if split_beta(beta)[1] == 0.0:
            msg = (
                f"beta={beta:g} is an integer: the sinc quadrature is bypassed and exact, "
                "so there is no quadrature error to study"
            )
            raise ConfigError(msg)

    report_path = create_report_directory(output_dir, "quadrature")
    written = []
    for beta in config.betas:
        for kappa in config.kappas:
            errors = quadrature_error_curve(beta, kappa, config.L, config.ks)
            stem = _tag(beta=beta, kappa=kappa)
            written.append(export_quadrature_curve(config.ks, errors, report_path / f"{stem}.csv"))

            summary = {"max_error": max(errors), "min_error": min(errors)}
            resolved = [(k, error) for k, error in zip(config.ks, errors) if error > 0]
            if len({k for k, _ in resolved}) >= MIN_DATA_POINTS:
                summary["exponential_slope"] = fit_exponential_slope(*zip(*resolved))
            written.append(export_summary_stats(summary, report_path / f"{stem}_summary.csv"))
            logger.info(
                "quadrature study finished",
                beta=beta,
                kappa=kappa,
                exponential_slope=summary.get("exponential_slope"),
            )
    return written


def cmd_noise_study(
    config: RunConfig,
    output_dir: Path,
    workers: int | None = None,
    show_progress: bool = False,
) -> list[Path]:
    """Compare interpolated and projected noise against W_L over the levels."""
    config.require("noise-study")
    if config.quad_order not in PROJECTION_ORDERS:
        msg = (
            f"noise study projects with quad_order in {PROJECTION_ORDERS}, "
            f"got {config.quad_order}"
        )
        raise ConfigError(msg)

    rows = noise_transfer_study(
        config.L,
        config.levels,
        config.samples,
        config.study_seed(),
        order=config.quad_order,
        solver=config.solver_config(),
        workers=workers,
        show_progress=show_progress,
    )
    report_path = create_report_directory(output_dir, "noise")
    written = [export_noise_study(rows, config.L, report_path / f"noise_L-{config.L}.csv")]

    summary = {
        "finest_interpolation_error": rows[-1].interpolation_error,
        "finest_projection_error": rows[-1].projection_error,
    }
    h = [row.h_inball for row in rows]
    for name in ("interpolation", "projection"):
        errors = [getattr(row, f"{name}_error") for row in rows]
        if len(rows) >= MIN_DATA_POINTS and min(errors) > 0:
            summary[f"{name}_rate"] = fit_slope(h, errors)
    written.append(export_summary_stats(summary, report_path / f"noise_L-{config.L}_summary.csv"))
    logger.info("noise study finished", **summary)
    return written


def cmd_truncation_study(config: RunConfig, output_dir: Path) -> list[Path]:
    """Tabulate the exact truncation error for L = 1..config.L per (beta, kappa)."""
    config.require("truncation-study")
    if config.L < 1:
        msg = "truncation study needs L >= 1"
        raise ConfigError(msg)

    records = [
        {
            "beta": beta,
            "kappa": kappa,
            "L": degree,
            "truncation_error": truncation_error(beta, kappa, degree),
            "tail_integral": tail_integral(beta, kappa, degree),
        }
        for beta in config.betas
        for kappa in config.kappas
        for degree in range(1, config.L + 1)
    ]
    report_path = create_report_directory(output_dir, "truncation")
    output_path = export_truncation(records, report_path / "truncation.csv")
    logger.info("truncation study finished", rows=len(records), path=str(output_path))
    return [output_path]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphere-grf",
        description="Sample Whittle-Matern random fields on the sphere and study SFEM errors",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--log-level",
        help="DEBUG, INFO, WARNING, ERROR or CRITICAL (default: $LOG_LEVEL or INFO)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    helps = {
        "sample": "Write field samples as VTK and CSV",
        "convergence": "Monte Carlo strong error over mesh levels",
        "quadrature-study": "Sinc quadrature error over a list of steps k",
        "noise-study": "Interpolated versus projected white noise over mesh levels",
        "truncation-study": "Exact truncation error over L",
    }
    for name, text in helps.items():
        command = commands.add_parser(name, help=text)
        command.add_argument(
            "-c", "--config", type=Path, required=True, help="Path to YAML configuration file"
        )
        command.add_argument(
            "-o",
            "--out",
            type=Path,
            help="Output directory (default: the config's output key)",
        )
        if name in ("sample", "convergence", "noise-study"):
            command.add_argument(
                "-w",
                "--workers",
                type=int,
                help="Maximum concurrent samples (default: CPU count)",
            )
        if name in ("convergence", "noise-study"):
            command.add_argument(
                "--progress", action="store_true", help="Show per-level progress bars"
            )
        if name == "sample":
            command.add_argument(
                "--export-matrices",
                action="store_true",
                help="Also write mass.mtx and stiffness.mtx",
            )
    return parser


def run_command(args: argparse.Namespace, config: RunConfig) -> list[Path]:
    """Dispatch a parsed command line to its command function."""
    output_dir = args.out if args.out is not None else Path(config.output)
    if args.command == "sample":
        return cmd_sample(config, output_dir, args.workers, args.export_matrices)
    if args.command == "convergence":
        return cmd_convergence(config, output_dir, args.workers, args.progress)
    if args.command == "quadrature-study":
        return cmd_quadrature_study(config, output_dir)
    if args.command == "noise-study":
        return cmd_noise_study(config, output_dir, args.workers, args.progress)
    return cmd_truncation_study(config, output_dir)


def main(argv: list[str] | None = None) -> int:
    """Main CLI entry point.

    Args:
        argv: Command line arguments (defaults to sys.argv)

    Returns:
        Exit code: 0 success, 2 config error, 3 solver failure, 4 I/O error,
        1 anything else
    """
    args = _build_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        config = load_config(args.config)
        if config.command is not None and config.command != args.command:
            logger.warning(
                "config written for another command", config_command=config.command
            )
        bind_run_context(command=args.command, config=str(args.config), seed=config.seed)
        written = run_command(args, config)
    except (ValidationError, ConfigError, yaml.YAMLError) as e:
        logger.error("invalid configuration", error=str(e))
        return EXIT_CONFIG
    except ConvergenceError as e:
        logger.error(
            "linear solve did not converge",
            stage=e.stage,
            residual=e.residual,
            iterations=e.iterations,
        )
        return EXIT_NUMERICAL
    except OSError as e:
        logger.error("file access failed", path=str(e.filename), error=str(e))
        return EXIT_IO
    except Exception as e:
        logger.error("command failed", error=str(e), exc_info=True)
        return EXIT_UNEXPECTED

    logger.info("command finished", outputs=[str(path) for path in written])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
