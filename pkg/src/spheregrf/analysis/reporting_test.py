"""Tests for reporting functionality."""

import numpy as np
import pandas as pd
import pytest
from scipy import io as scipy_io

from spheregrf.analysis.convergence import ConvergenceRow, NoiseRow
from spheregrf.analysis.reporting import (
    CONVERGENCE_COLUMNS,
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
from spheregrf.mesh.sphere import icosphere
from spheregrf.sfem.assembly import FemField, FemOperators

STUDY = {"beta": 0.75, "kappa": 1.0, "k": 0.5, "L": 1, "n_samples": 10}


def read_csv(path):
    return pd.read_csv(path, float_precision="round_trip")


def convergence_rows():
    return [
        ConvergenceRow(1, 0.15, 0.6, 42, 0.02, None, 0.001),
        ConvergenceRow(2, 0.08, 0.3, 162, 0.005, 2.0, 0.0002),
    ]


def test_exports_convergence_rows_with_study_columns(tmp_path):
    """Writes one row per level with the study constants repeated."""
    output_path = export_convergence(convergence_rows(), STUDY, tmp_path / "convergence.csv")

    loaded = read_csv(output_path)
    assert list(loaded.columns) == CONVERGENCE_COLUMNS
    assert loaded["level"].tolist() == [1, 2]
    assert loaded["beta"].tolist() == [0.75, 0.75]
    assert loaded["strong_error"].tolist() == [0.02, 0.005]


def test_first_pairwise_rate_is_an_empty_cell(tmp_path):
    """Leaves the first row's pairwise rate blank."""
    output_path = export_convergence(convergence_rows(), STUDY, tmp_path / "convergence.csv")

    second_line = output_path.read_text().splitlines()[1]
    assert second_line.split(",")[CONVERGENCE_COLUMNS.index("pairwise_rate")] == ""


def test_csv_uses_unix_newlines_and_full_precision(tmp_path):
    """Writes LF line endings and round-trippable floats."""
    rows = [ConvergenceRow(0, 0.1, 0.2, 12, 1.0 / 3.0)]
    output_path = export_convergence(rows, STUDY, tmp_path / "precision.csv")

    raw = output_path.read_bytes()
    assert b"\r\n" not in raw
    assert read_csv(output_path)["strong_error"][0] == 1.0 / 3.0


def test_rewriting_gives_identical_bytes(tmp_path):
    """Produces byte-identical files for identical rows."""
    first = export_convergence(convergence_rows(), STUDY, tmp_path / "a.csv")
    second = export_convergence(convergence_rows(), STUDY, tmp_path / "b.csv")

    assert first.read_bytes() == second.read_bytes()


def test_raises_on_empty_convergence_rows(tmp_path):
    """Raises ValueError for an empty study."""
    with pytest.raises(ValueError, match="convergence rows cannot be empty"):
        export_convergence([], STUDY, tmp_path / "convergence.csv")


def test_raises_on_missing_study_constants(tmp_path):
    """Names the study constants that are missing."""
    with pytest.raises(ValueError, match="n_samples"):
        export_convergence(
            convergence_rows(),
            {"beta": 0.75, "kappa": 1.0, "k": 0.5, "L": 1},
            tmp_path / "convergence.csv",
        )


def test_exports_quadrature_curve(tmp_path):
    """Writes (k, max_rel_error) pairs."""
    output_path = export_quadrature_curve([1.0, 0.5], [1e-2, 1e-5], tmp_path / "quad.csv")

    loaded = read_csv(output_path)
    assert list(loaded.columns) == ["k", "max_rel_error"]
    assert loaded["max_rel_error"].tolist() == [1e-2, 1e-5]


def test_raises_on_mismatched_quadrature_curve(tmp_path):
    """Rejects k and error lists of different lengths."""
    with pytest.raises(ValueError, match="matching"):
        export_quadrature_curve([1.0, 0.5], [1e-2], tmp_path / "quad.csv")


def test_exports_noise_study(tmp_path):
    """Writes both transfer errors per level with the truncation degree."""
    rows = [NoiseRow(2, 0.08, 0.3, 162, 0.01, 0.008)]

    loaded = read_csv(export_noise_study(rows, 1, tmp_path / "noise.csv"))

    assert loaded["L"].tolist() == [1]
    assert loaded["projection_error"].tolist() == [0.008]


def test_exports_truncation_records(tmp_path):
    """Writes the truncation columns in a fixed order."""
    records = [
        {"L": 1, "beta": 0.75, "kappa": 1.0, "tail_integral": 0.5, "truncation_error": 0.4}
    ]

    loaded = read_csv(export_truncation(records, tmp_path / "truncation.csv"))

    assert list(loaded.columns) == ["beta", "kappa", "L", "truncation_error", "tail_integral"]


def test_exports_field_with_coordinates(tmp_path):
    """Writes vertex index, coordinates and value for every vertex."""
    mesh = icosphere(1)
    field = FemField(mesh, np.arange(mesh.n_vertices, dtype=float))

    loaded = read_csv(export_field(field, tmp_path / "field.csv"))

    assert list(loaded.columns) == ["vertex", "x", "y", "z", "value"]
    assert len(loaded) == 42
    np.testing.assert_array_equal(loaded[["x", "y", "z"]].to_numpy(), mesh.vertices)


def test_exports_summary_stats_to_csv(tmp_path):
    """Exports summary statistics to CSV file."""
    output_path = export_summary_stats({"fitted_rate": 2.01}, tmp_path / "summary.csv")

    loaded = read_csv(output_path)
    assert loaded["metric"].tolist() == ["fitted_rate"]
    assert loaded["value"].tolist() == [2.01]


def test_raises_on_empty_metrics(tmp_path):
    """Raises ValueError for empty metrics dictionary."""
    with pytest.raises(ValueError, match="metrics dictionary cannot be empty"):
        export_summary_stats({}, tmp_path / "summary.csv")


def test_writes_legacy_vtk_with_several_scalars(tmp_path):
    """Writes points, triangle cells and one SCALARS block per array."""
    mesh = icosphere(0)
    values = np.linspace(0.0, 1.0, mesh.n_vertices)

    output_path = write_vtk(
        mesh, tmp_path / "field.vtk", {"field": values, "noise": 2.0 * values}
    )

    lines = output_path.read_text().splitlines()
    assert lines[0] == "# vtk DataFile Version 2.0"
    assert lines[2] == "ASCII"
    assert lines[3] == "DATASET UNSTRUCTURED_GRID"
    assert lines[4] == "POINTS 12 double"
    assert "CELLS 20 80" in lines
    assert "CELL_TYPES 20" in lines
    assert "POINT_DATA 12" in lines
    assert "SCALARS field double 1" in lines
    assert "SCALARS noise double 1" in lines
    assert lines.count("LOOKUP_TABLE default") == 2
    assert lines[5 + mesh.n_vertices + 1].startswith("3 ")


def test_vtk_values_round_trip(tmp_path):
    """Writes scalars that read back to the same floats."""
    mesh = icosphere(0)
    values = np.random.default_rng(0).standard_normal(mesh.n_vertices)

    lines = write_vtk(mesh, tmp_path / "field.vtk", {"field": values}).read_text().splitlines()

    start = lines.index("LOOKUP_TABLE default") + 1
    parsed = np.array([float(line) for line in lines[start : start + mesh.n_vertices]])
    np.testing.assert_array_equal(parsed, values)


def test_vtk_without_point_data_has_geometry_only(tmp_path):
    """Omits the POINT_DATA section when no arrays are given."""
    text = write_vtk(icosphere(0), tmp_path / "mesh.vtk").read_text()

    assert "POINT_DATA" not in text


@pytest.mark.parametrize(
    ("name", "length", "message"),
    [("field", 5, "expected"), ("two words", 12, "non-empty word")],
)
def test_vtk_rejects_bad_point_data(tmp_path, name, length, message):
    """Rejects arrays of the wrong length and names containing spaces."""
    with pytest.raises(ValueError, match=message):
        write_vtk(icosphere(0), tmp_path / "bad.vtk", {name: np.zeros(length)})


def test_exports_matrix_market(tmp_path):
    """Writes mass and stiffness matrices that read back unchanged."""
    operators = FemOperators.assemble(icosphere(1))

    mass_path, stiffness_path = export_matrix_market(operators, tmp_path / "matrices")

    assert abs(scipy_io.mmread(mass_path) - operators.mass).max() <= 1e-15
    assert abs(scipy_io.mmread(stiffness_path) - operators.stiffness).max() <= 1e-14


def test_creates_report_directory(tmp_path):
    """Creates the report directory below the base path."""
    report_dir = create_report_directory(tmp_path, "convergence")

    assert report_dir.exists()
    assert report_dir == tmp_path / "convergence"


def test_creates_report_directory_from_string_path(tmp_path):
    """Accepts string paths."""
    report_dir = create_report_directory(str(tmp_path), "samples")

    assert report_dir.is_dir()
