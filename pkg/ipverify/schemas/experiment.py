from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ipverify.schemas.distribution import DistSpec
from ipverify.schemas.ipmap import FabSpec, MapSpec


class IpExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(default="custom", description="Scenario label echoed into reports")
    map: MapSpec
    law_x: DistSpec
    law_y: DistSpec
    predicted_u: Optional[DistSpec] = Field(default=None, description="Expected law of U; None skips the KS check")
    predicted_v: Optional[DistSpec] = Field(default=None, description="Expected law of V; None skips the KS check")
    # law of 1/(alpha U) for the beta = 0 scenario
    predicted_inv_u: Optional[DistSpec] = None
    n: int = Field(default=200_000, ge=1000)
    seed: int = Field(default=20240601, ge=0)
    n_permutations: int = Field(default=199, ge=99)
    dcorr_subsample: int = Field(default=4000, ge=4)
    significance: float = Field(default=0.01, gt=0, lt=1)
    ks_threshold: Optional[float] = Field(default=None, gt=0, description="Defaults to c(0.01)/sqrt(n)")
    expect: Literal["independent", "dependent"] = "independent"
    retries: int = Field(default=1, ge=0, description="Fresh-seed reruns allowed after a failed attempt")

    @model_validator(mode="after")
    def check_config(self) -> "IpExperimentConfig":
        if self.dcorr_subsample > self.n:
            raise ValueError(f"dcorr_subsample ({self.dcorr_subsample}) exceeds n ({self.n})")
        if isinstance(self.map, FabSpec) and self.map.alpha == self.map.beta:
            raise ValueError("independence experiments need alpha != beta for the fab map")
        unit = self.map.unit_square
        for name in ("law_x", "law_y"):
            law = getattr(self, name)
            if law.second_kind == unit:
                raise ValueError(f"{name} support does not match the domain of map {self.map.kind}")
        return self


class VerificationReport(BaseModel):
    name: str
    dcorr_stat: float = Field(..., ge=0, le=1)
    p_value: float = Field(..., ge=0, le=1)
    ks_u: Optional[float] = Field(default=None, ge=0, le=1)
    ks_v: Optional[float] = Field(default=None, ge=0, le=1)
    ks_inv_u: Optional[float] = Field(default=None, ge=0, le=1)
    thresholds: dict[str, float]
    passed: bool
    attempts: int = 1
    seed_used: int
    metadata: dict[str, Any] = Field(default_factory=dict)
