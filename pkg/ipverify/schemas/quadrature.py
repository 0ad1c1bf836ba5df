from pydantic import BaseModel, ConfigDict, Field


class QuadratureConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    rel_tol: float = Field(default=1e-11, gt=0, description="Relative tolerance between refinement levels")
    abs_tol: float = Field(default=0.0, ge=0, description="Absolute floor on the integral value")
    max_subdivisions: int = Field(default=12, ge=1, description="Maximum number of step-halving levels")
