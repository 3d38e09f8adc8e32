"""White noise transfer and the fractional SFEM field sampler."""

from spheregrf.sampling.fractional import (
    DiscretizationPlan,
    FieldSample,
    FieldSampler,
    ModelParams,
    apply_fractional,
    calibrate_discretization,
    linear_solve_count,
    sample_field,
    sample_rng,
    solve_recursion,
)
from spheregrf.sampling.noise import (
    NoiseMode,
    NoiseProjector,
    interpolate_noise,
    project_noise,
    sample_white_noise,
    transfer_noise,
)

__all__ = [
    "DiscretizationPlan",
    "FieldSample",
    "FieldSampler",
    "ModelParams",
    "NoiseMode",
    "NoiseProjector",
    "apply_fractional",
    "calibrate_discretization",
    "interpolate_noise",
    "linear_solve_count",
    "project_noise",
    "sample_field",
    "sample_rng",
    "sample_white_noise",
    "solve_recursion",
    "transfer_noise",
]
