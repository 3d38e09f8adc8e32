"""Run configuration for sphere-grf using Pydantic."""

from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from spheregrf.mesh.sphere import MAX_LEVEL
from spheregrf.sampling.fractional import ModelParams
from spheregrf.sampling.noise import PROJECTION_ORDERS, NoiseMode
from spheregrf.sfem.solver import SolverConfig

Command = Literal["sample", "convergence", "quadrature-study", "noise-study", "truncation-study"]

# Keys each command reads; everything else may be omitted for that command.
REQUIRED_KEYS: dict[str, tuple[str, ...]] = {
    "sample": ("beta", "kappa", "L", "k", "levels", "seed"),
    "convergence": ("beta", "kappa", "L", "k", "levels", "samples", "seed"),
    "quadrature-study": ("beta", "kappa", "L", "ks"),
    "noise-study": ("L", "levels", "samples", "seed"),
    "truncation-study": ("beta", "kappa", "L"),
}


class ConfigError(ValueError):
    """A configuration that parses but cannot drive the requested command."""


def _as_list(value):
    if value is None:
        return []
    return list(value) if isinstance(value, list) else [value]


class RunConfig(BaseModel):
    """Root configuration of one sphere-grf run."""

    model_config = ConfigDict(extra="forbid")

    command: Command | None = None
    beta: float | list[float] | None = None
    kappa: float | list[float] | None = None
    L: int | None = Field(default=None, ge=0)
    k: float | None = Field(default=None, gt=0)
    ks: list[float] | None = None
    levels: list[int] | None = None
    samples: int | None = Field(default=None, ge=1)
    seed: int | list[int] | None = None
    noise_mode: Literal["project", "interpolate"] = "project"
    cg_tol: float = Field(default=1e-10, gt=0, lt=1)
    cg_max_iter: int | None = Field(default=None, ge=1)
    quad_order: Literal[1, 2, 5] = 5
    preconditioner: Literal["none", "jacobi"] = "none"
    output: str = "output"

    @field_validator("beta")
    @classmethod
    def validate_beta(cls, v):
        """Require beta > 1/2 so the field is square integrable."""
        for beta in _as_list(v):
            if beta <= 0.5:
                raise ValueError(f"beta must exceed 1/2, got {beta}")
        if isinstance(v, list) and not v:
            raise ValueError("beta list cannot be empty")
        return v

    @field_validator("kappa")
    @classmethod
    def validate_kappa(cls, v):
        """Require positive kappa."""
        for kappa in _as_list(v):
            if kappa <= 0:
                raise ValueError(f"kappa must be positive, got {kappa}")
        if isinstance(v, list) and not v:
            raise ValueError("kappa list cannot be empty")
        return v

    @field_validator("ks")
    @classmethod
    def validate_ks(cls, v):
        """Require positive quadrature steps."""
        for k in _as_list(v):
            if k <= 0:
                raise ValueError(f"quadrature steps must be positive, got {k}")
        return v

    @field_validator("levels")
    @classmethod
    def validate_levels(cls, v):
        """Require a non-empty, strictly ascending list of levels in range."""
        if v is None:
            return v
        if not v:
            raise ValueError("levels cannot be empty")
        if any(fine <= coarse for coarse, fine in zip(v, v[1:])):
            raise ValueError(f"levels must be strictly ascending, got {v}")
        if v[0] < 0 or v[-1] > MAX_LEVEL:
            raise ValueError(f"levels must lie in 0..{MAX_LEVEL}, got {v}")
        return v

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, v):
        """Require nonnegative seeds."""
        for seed in _as_list(v):
            if seed < 0:
                raise ValueError(f"seeds must be nonnegative, got {seed}")
        if isinstance(v, list) and not v:
            raise ValueError("seed list cannot be empty")
        return v

    @model_validator(mode="after")
    def validate_projection_order(self):
        """Projection needs a quadrature order of 2 or 5."""
        if self.noise_mode == "project" and self.quad_order not in PROJECTION_ORDERS:
            raise ValueError(
                f"noise_mode 'project' needs quad_order in {PROJECTION_ORDERS}, "
                f"got {self.quad_order}"
            )
        return self

    @property
    def betas(self) -> list[float]:
        return _as_list(self.beta)

    @property
    def kappas(self) -> list[float]:
        return _as_list(self.kappa)

    @property
    def seeds(self) -> list[int]:
        return _as_list(self.seed)

    def require(self, command: str) -> None:
        """Check that every key ``command`` reads is present.

        Raises:
            ConfigError: Naming the missing keys
        """
        missing = [key for key in REQUIRED_KEYS[command] if getattr(self, key) is None]
        if missing:
            msg = f"{command} needs config key(s): {', '.join(missing)}"
            raise ConfigError(msg)

    def study_seed(self) -> int:
        """The single seed of a Monte Carlo study."""
        seeds = self.seeds
        if len(seeds) != 1:
            msg = f"a study takes exactly one seed, got {seeds}"
            raise ConfigError(msg)
        return seeds[0]

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            tolerance=self.cg_tol,
            max_iterations=self.cg_max_iter,
            preconditioner=self.preconditioner,
        )

    def noise(self) -> NoiseMode:
        if self.noise_mode == "interpolate":
            return NoiseMode.interpolate()
        return NoiseMode.project(self.quad_order)

    def model_params(self, beta: float, kappa: float) -> ModelParams:
        """Field model for one (beta, kappa) pair of this configuration."""
        return ModelParams(
            beta=beta,
            kappa=kappa,
            degree=self.L,
            step=self.k,
            noise_mode=self.noise(),
            solver=self.solver_config(),
        )


def load_config(config_path: Path | str) -> RunConfig:
    """Load and validate configuration from a YAML file.

    Raises:
        ConfigError: If the file does not hold a mapping
        pydantic.ValidationError: If a key is unknown or a value invalid
    """
    path = Path(config_path)
    with path.open() as f:
        data = yaml.safe_load(f)
    if not isinstance(data, dict):
        msg = f"{path} must contain a mapping of config keys"
        raise ConfigError(msg)
    return RunConfig(**data)


def dump_config(config: RunConfig) -> str:
    """Serialize a configuration back to YAML, keeping unset keys out."""
    return yaml.safe_dump(config.model_dump(exclude_none=True), sort_keys=False)
