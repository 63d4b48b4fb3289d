"""Configuration models for flow runs, monitors and verification suites."""

import json
import os
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import ConfigurationError

Quantity = Literal["A", "H"]
ShapeKind = Literal["circle", "ellipse", "sphere_profile", "dumbbell", "spheroid", "sphere"]
EvolutionEquation = Literal["metric", "normal", "h", "H", "A2"]

OUTPUT_ENV_VAR = "MCFLAB_OUT"


class FlowConfig(BaseModel):
    """Time-stepping controls for a single flow run."""
    model_config = ConfigDict(frozen=True)

    t_cap: float = Field(gt=0)
    c_stab: float = Field(default=0.2, gt=0, le=1)
    dt_floor: float = Field(default=1e-12, gt=0)
    blowup_threshold: float = Field(default=1e8, gt=1)
    resolution: Optional[int] = Field(default=None, ge=8)
    record_stride: int = Field(default=1, ge=1)
    redistribute: bool = False


class MonitorSet(BaseModel):
    """Which (quantity, exponent) accumulators to track, plus an optional curvature bound."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    quantities: List[Quantity] = Field(default_factory=lambda: ["A", "H"], min_length=1)
    alphas: List[float] = Field(default_factory=lambda: [2.0], min_length=1)
    c_bound: Optional[float] = Field(default=None, ge=0, alias="C_bound")

    @field_validator("alphas")
    @classmethod
    def _positive_alphas(cls, value: List[float]) -> List[float]:
        if any(alpha <= 0 for alpha in value):
            raise ValueError("every alpha must be > 0")
        return [float(alpha) for alpha in value]

    @property
    def pairs(self) -> Tuple[Tuple[str, float], ...]:
        """Registered (quantity, alpha) pairs in a stable order, duplicates removed."""
        seen: Dict[Tuple[str, float], None] = {}
        for quantity in self.quantities:
            for alpha in self.alphas:
                seen[(quantity, float(alpha))] = None
        return tuple(seen)

    def with_pairs(self, extra: List[Tuple[str, float]]) -> "MonitorSet":
        """Copy of this set that also tracks the given pairs."""
        quantities = list(dict.fromkeys(self.quantities + [q for q, _ in extra]))
        alphas = list(dict.fromkeys(self.alphas + [float(a) for _, a in extra]))
        return MonitorSet(quantities=quantities, alphas=alphas, c_bound=self.c_bound)


class GeometrySettings(BaseModel):
    """Initial-shape section of a run configuration."""
    kind: ShapeKind
    params: Dict[str, float] = Field(default_factory=dict)
    m: Optional[int] = Field(default=None, ge=8)
    n: Optional[int] = Field(default=None, ge=1)


class OutputSettings(BaseModel):
    """Where artifacts are written."""
    dir: str = "mcflab_out"


class RunConfig(BaseModel):
    """Top-level document accepted by the `run` command."""
    geometry: GeometrySettings
    flow: FlowConfig
    monitors: MonitorSet = Field(default_factory=MonitorSet)
    output: OutputSettings = Field(default_factory=OutputSettings)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        """Load and validate a JSON run configuration."""
        return load_config(cls, path)

    def output_dir(self) -> Path:
        """Output directory, honouring the MCFLAB_OUT override."""
        return Path(os.environ.get(OUTPUT_ENV_VAR) or self.output.dir)


class SuiteConfig(BaseModel):
    """Fields shared by every verification suite."""
    output: OutputSettings = Field(default_factory=lambda: OutputSettings(dir="mcflab_verify"))

    def output_dir(self) -> Path:
        return Path(os.environ.get(OUTPUT_ENV_VAR) or self.output.dir)


class EvolutionSuiteConfig(SuiteConfig):
    """Finite-difference residuals of the evolution equations on a smooth flow."""
    geometry: GeometrySettings = Field(
        default_factory=lambda: GeometrySettings(kind="ellipse", params={"a": 2.0, "b": 1.0})
    )
    resolutions: List[int] = Field(default_factory=lambda: [256, 512], min_length=2)
    t_cap: float = Field(default=0.005, gt=0)
    c_stab: float = Field(default=0.2, gt=0, le=1)
    equations: List[EvolutionEquation] = Field(
        default_factory=lambda: ["metric", "normal", "h", "H", "A2"]
    )
    min_order: float = Field(default=1.5, gt=0)


class InvarianceSuiteConfig(SuiteConfig):
    """Parabolic rescaling of an exact shrinking sphere."""
    n: int = Field(default=2, ge=1)
    r0: float = Field(default=1.0, gt=0)
    scales: List[float] = Field(default_factory=lambda: [0.5, 4.0, 100.0], min_length=1)
    t_end_fraction: float = Field(default=0.9, gt=0, lt=1)
    center_fraction: float = Field(default=0.5, gt=0, lt=1)
    c_stab: float = Field(default=0.2, gt=0, le=1)
    tolerance: float = Field(default=1e-10, gt=0)

    @field_validator("scales")
    @classmethod
    def _positive_scales(cls, value: List[float]) -> List[float]:
        if any(q <= 0 for q in value):
            raise ValueError("every rescaling factor must be > 0")
        return value


class MoserSuiteConfig(SuiteConfig):
    """Sup bound for H on exact spheres over a grid of radii and times."""
    n: int = Field(default=3, ge=3)
    radii: List[float] = Field(default_factory=lambda: [1.0, 2.0, 10.0], min_length=1)
    time_fractions: List[float] = Field(default_factory=lambda: [0.3, 0.5, 0.8], min_length=1)
    c_stab: float = Field(default=0.2, gt=0, le=1)

    @field_validator("time_fractions")
    @classmethod
    def _fractions_in_range(cls, value: List[float]) -> List[float]:
        if any(not 0 < f < 1 for f in value):
            raise ValueError("time fractions must lie in (0, 1)")
        return value


class DichotomySuiteConfig(SuiteConfig):
    """Integrability dichotomy at the critical exponent on exact shrinking spheres."""
    dimensions: List[int] = Field(default_factory=lambda: [1, 2, 3], min_length=1)
    r0: float = Field(default=1.0, gt=0)
    offsets: List[float] = Field(default_factory=lambda: [-1.0, 0.0, 1.0], min_length=1)
    quantity: Quantity = "H"
    c_stab: float = Field(default=0.05, gt=0, le=1)
    blowup_threshold: float = Field(default=1e8, gt=1)
    tolerance: float = Field(default=0.05, gt=0)


def load_config(model: type, path: str):
    """Read a JSON file and validate it against `model`, raising ConfigurationError."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except OSError as e:
        raise ConfigurationError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"config {path} is not valid JSON: {e}") from e

    try:
        return model.model_validate(document)
    except ValidationError as e:
        raise ConfigurationError(f"invalid config {path}: {e}") from e
