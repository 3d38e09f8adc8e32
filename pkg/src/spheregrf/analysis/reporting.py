"""CSV, VTK and Matrix Market export."""

from collections.abc import Mapping, Sequence
from dataclasses import asdict
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import io as scipy_io

from spheregrf.analysis.convergence import ConvergenceRow, NoiseRow
from spheregrf.mesh.sphere import TriangleMesh
from spheregrf.sfem.assembly import FemField, FemOperators

# Full precision and fixed newlines keep reruns byte-identical.
CSV_OPTIONS = {"index": False, "lineterminator": "\n", "float_format": "%.17g"}

VTK_TRIANGLE = 5

CONVERGENCE_COLUMNS = [
    "level",
    "h_inball",
    "h_diam",
    "n_vertices",
    "beta",
    "kappa",
    "k",
    "L",
    "n_samples",
    "strong_error",
    "pairwise_rate",
    "standard_error",
]
TRUNCATION_COLUMNS = ["beta", "kappa", "L", "truncation_error", "tail_integral"]


def _write_csv(frame: pd.DataFrame, output_path: Path | str) -> Path:
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(output_path, **CSV_OPTIONS)
    return output_path


def export_convergence(
    rows: Sequence[ConvergenceRow],
    study: Mapping[str, float | int],
    output_path: Path | str,
) -> Path:
    """Export a strong error study to CSV, one row per level.

    Args:
        rows: Study rows, coarse to fine
        study: Study constants repeated on every row (beta, kappa, k, L, n_samples)
        output_path: Path to save CSV file

    Returns:
        The written path
    """
    if not rows:
        msg = "convergence rows cannot be empty"
        raise ValueError(msg)

    missing = {"beta", "kappa", "k", "L", "n_samples"} - set(study)
    if missing:
        msg = f"study constants missing: {sorted(missing)}"
        raise ValueError(msg)

    frame = pd.DataFrame([{**asdict(row), **study} for row in rows])
    return _write_csv(frame[CONVERGENCE_COLUMNS], output_path)


def export_quadrature_curve(
    ks: Sequence[float], errors: Sequence[float], output_path: Path | str
) -> Path:
    """Export (k, max_rel_error) pairs to CSV."""
    if len(ks) == 0 or len(ks) != len(errors):
        msg = f"need matching non-empty k and error lists, got {len(ks)} and {len(errors)}"
        raise ValueError(msg)

    frame = pd.DataFrame({"k": list(ks), "max_rel_error": list(errors)})
    return _write_csv(frame, output_path)


def export_noise_study(
    rows: Sequence[NoiseRow], degree: int, output_path: Path | str
) -> Path:
    """Export interpolation and projection noise errors per level to CSV."""
    if not rows:
        msg = "noise rows cannot be empty"
        raise ValueError(msg)

    frame = pd.DataFrame([{**asdict(row), "L": degree} for row in rows])
    columns = [
        "level",
        "h_inball",
        "h_diam",
        "n_vertices",
        "L",
        "interpolation_error",
        "projection_error",
    ]
    return _write_csv(frame[columns], output_path)


def export_truncation(records: Sequence[Mapping[str, float]], output_path: Path | str) -> Path:
    """Export truncation errors, one record per (beta, kappa, L)."""
    if not records:
        msg = "truncation records cannot be empty"
        raise ValueError(msg)

    frame = pd.DataFrame(list(records))
    return _write_csv(frame[TRUNCATION_COLUMNS], output_path)


def export_field(field: FemField, output_path: Path | str) -> Path:
    """Export nodal values with vertex coordinates to CSV."""
    vertices = field.mesh.vertices
    frame = pd.DataFrame(
        {
            "vertex": np.arange(field.mesh.n_vertices),
            "x": vertices[:, 0],
            "y": vertices[:, 1],
            "z": vertices[:, 2],
            "value": field.values,
        }
    )
    return _write_csv(frame, output_path)


def export_summary_stats(metrics: Mapping[str, float], output_path: Path | str) -> Path:
    """Export summary statistics to CSV.

    Args:
        metrics: Dictionary of study metrics
        output_path: Path to save CSV file

    Returns:
        The written path
    """
    if not metrics:
        msg = "metrics dictionary cannot be empty"
        raise ValueError(msg)

    frame = pd.DataFrame([{"metric": key, "value": value} for key, value in metrics.items()])
    return _write_csv(frame, output_path)


def write_vtk(
    mesh: TriangleMesh,
    output_path: Path | str,
    point_data: Mapping[str, np.ndarray] | None = None,
    title: str = "sphere-grf field",
) -> Path:
    """Write the mesh and nodal scalars as a legacy ASCII VTK unstructured grid.

    Args:
        mesh: Triangulated sphere
        output_path: Destination ``.vtk`` file
        point_data: Named nodal arrays, each of length V, written as double scalars
        title: Header line (single line)

    Returns:
        The written path
    """
    point_data = point_data or {}
    for name, values in point_data.items():
        if np.shape(values) != (mesh.n_vertices,):
            msg = f"point data {name!r} has shape {np.shape(values)}, expected ({mesh.n_vertices},)"
            raise ValueError(msg)
        if not name or any(character.isspace() for character in name):
            msg = f"point data name {name!r} must be a non-empty word"
            raise ValueError(msg)

    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)

    lines = [
        "# vtk DataFile Version 2.0",
        title.splitlines()[0] if title else "sphere-grf",
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {mesh.n_vertices} double",
    ]
    lines.extend(f"{x!r} {y!r} {z!r}" for x, y, z in mesh.vertices.tolist())
    lines.append(f"CELLS {mesh.n_triangles} {4 * mesh.n_triangles}")
    lines.extend(f"3 {a} {b} {c}" for a, b, c in mesh.triangles.tolist())
    lines.append(f"CELL_TYPES {mesh.n_triangles}")
    lines.extend([str(VTK_TRIANGLE)] * mesh.n_triangles)
    if point_data:
        lines.append(f"POINT_DATA {mesh.n_vertices}")
        for name, values in point_data.items():
            lines.append(f"SCALARS {name} double 1")
            lines.append("LOOKUP_TABLE default")
            lines.extend(repr(value) for value in np.asarray(values, dtype=float).tolist())

    output_path.write_text("\n".join(lines) + "\n")
    return output_path


def export_matrix_market(operators: FemOperators, directory: Path | str) -> tuple[Path, Path]:
    """Write the mass and stiffness matrices as Matrix Market files.

    Returns:
        Paths of ``mass.mtx`` and ``stiffness.mtx``
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = (directory / "mass.mtx", directory / "stiffness.mtx")
    level = operators.mesh.level
    scipy_io.mmwrite(paths[0], operators.mass, comment=f"P1 mass matrix, icosphere level {level}")
    scipy_io.mmwrite(
        paths[1], operators.stiffness, comment=f"P1 stiffness matrix, icosphere level {level}"
    )
    return paths


def create_report_directory(base_path: Path | str, report_name: str) -> Path:
    """Create the output directory of one command run.

    Args:
        base_path: Base output directory
        report_name: Name of the report

    Returns:
        Path to the created report directory
    """
    report_path = Path(base_path) / report_name
    report_path.mkdir(parents=True, exist_ok=True)
    return report_path
