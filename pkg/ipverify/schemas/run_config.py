from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ipverify.schemas.distribution import DistSpec
from ipverify.schemas.experiment import IpExperimentConfig
from ipverify.schemas.ipmap import MapSpec, PlanePoint
from ipverify.schemas.transform import ModelQuad, Role

Scenario = Literal["fab", "fainf", "fazero", "gdelta", "gdelta_unit", "negative_control"]


class RunConfigBase(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: Literal[1] = Field(default=1, alias="schema")
    out: Optional[Path] = Field(default=None, description="Report path; stdout when omitted")
    format: Literal["json", "csv"] = "json"
    seed: int = Field(default=20240601, ge=0)
    threads: Optional[int] = Field(default=None, ge=1, description="Worker cap; settings.MAX_WORKERS when omitted")
    summary: Optional[Path] = Field(default=None, description="CSV summary file, one row appended per run")


class TransformsRunConfig(RunConfigBase):
    model: ModelQuad = Field(default_factory=ModelQuad)
    grid: list[float] = Field(default_factory=lambda: [0.0, 0.5, 1.0, 2.0], min_length=1)
    gammas: list[float] = Field(default_factory=lambda: [0.5, 3.0], min_length=2)
    tolerance: float = Field(default=1e-8, gt=0)
    mc_samples: int = Field(default=0, ge=0, description="Monte Carlo batch size; 0 skips the sampling checks")
    mc_sigmas: float = Field(default=4.0, gt=0)
    perturb_role: Optional[Role] = None
    perturb_lambda: float = 0.0


class MapsRunConfig(RunConfigBase):
    alpha: float = Field(default=2.0, gt=0)
    beta: float = Field(default=0.5, gt=0)
    delta: float = Field(default=2.0, gt=0)
    points: int = Field(default=10_000, ge=1)
    tolerance: float = Field(default=1e-12, gt=0)
    jacobian_tolerance: float = Field(default=1e-6, gt=0)

    @model_validator(mode="after")
    def check_distinct(self) -> "MapsRunConfig":
        if self.alpha == self.beta:
            raise ValueError("the fab map checks need alpha != beta")
        return self


class IpRunConfig(RunConfigBase):
    scenario: Scenario = "fab"
    experiment: Optional[IpExperimentConfig] = Field(
        default=None, description="Explicit experiment; overrides scenario"
    )
    lam: float = 0.3
    a: float = Field(default=1.5, gt=0)
    b: float = Field(default=2.0, gt=0)
    c: float = Field(default=1.2, gt=0)
    alpha: float = Field(default=2.0, gt=0)
    beta: float = Field(default=0.5, gt=0)
    delta: float = Field(default=2.0, gt=0)
    n: int = Field(default=200_000, ge=1000)
    n_permutations: int = Field(default=199, ge=99)
    dcorr_subsample: int = Field(default=4000, ge=4)
    retries: int = Field(default=1, ge=0)


class HdeRunConfig(RunConfigBase):
    alpha: float = Field(default=2.0, gt=0)
    lam: float = 0.3
    a: float = Field(default=1.5, gt=0)
    b: float = Field(default=2.0, gt=0)
    x_count: int = Field(default=21, ge=3, description="Lattice points beta3 + {0..x_count-1}")
    moment_count: int = Field(default=11, ge=1)
    tolerance: float = Field(default=1e-9, gt=0)
    fit_tolerance: float = Field(default=1e-6, gt=0)

    @model_validator(mode="after")
    def check_lam(self) -> "HdeRunConfig":
        if abs(self.lam) >= min(self.a, self.b):
            raise ValueError("|lam| must be below min(a, b)")
        return self


class SampleRunConfig(RunConfigBase):
    dist: DistSpec
    n: int = Field(default=1000, ge=1)


class DensityRunConfig(RunConfigBase):
    dist: DistSpec
    x: float


class MapEvalRunConfig(RunConfigBase):
    map: MapSpec
    point: PlanePoint
