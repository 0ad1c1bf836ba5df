from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

Role = Literal["X", "Y", "U", "V"]


class TransformPoint(BaseModel):
    """Exponents (s, theta, sigma) in the admissible set: theta, sigma, s+theta, s+sigma >= 0."""

    model_config = ConfigDict(frozen=True)

    s: float
    theta: float = Field(..., ge=0)
    sigma: float = Field(..., ge=0)

    @model_validator(mode="after")
    def check_admissible(self) -> "TransformPoint":
        if self.s + self.theta < 0 or self.s + self.sigma < 0:
            raise ValueError(f"point ({self.s}, {self.theta}, {self.sigma}) needs s+theta >= 0 and s+sigma >= 0")
        return self

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.s, self.theta, self.sigma)


class ModelQuad(BaseModel):
    """Shared parameters of the four laws X, Y, U, V around one map."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lam: float = Field(default=0.3, description="Asymmetry parameter, |lam| < min(a, b)")
    a: float = Field(default=1.5, gt=0)
    b: float = Field(default=2.0, gt=0)
    alpha: float = Field(default=2.0, gt=0)
    beta: float = Field(default=0.5, gt=0)

    @model_validator(mode="after")
    def check_lam(self) -> "ModelQuad":
        if abs(self.lam) >= min(self.a, self.b):
            raise ValueError(f"|lam| must be below min(a, b), got lam={self.lam}, a={self.a}, b={self.b}")
        return self


class ResidualRecord(BaseModel):
    identity: str
    point: list[float]
    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    tolerance: Optional[float] = None
    passed: bool = True

    @classmethod
    def from_sides(
        cls,
        identity: str,
        point: tuple[float, ...] | list[float],
        lhs: float,
        rhs: float,
        tol: Optional[float] = None,
        scale: Optional[float] = None,
    ) -> "ResidualRecord":
        """Relative residual is the gap over max(|lhs|, |rhs|) unless an explicit scale is given."""
        gap = abs(lhs - rhs)
        if scale is None:
            scale = max(abs(lhs), abs(rhs))
        else:
            scale = abs(scale)
        rel = gap / scale if scale > 0 else gap
        return cls(
            identity=identity,
            point=[float(v) for v in point],
            lhs=float(lhs),
            rhs=float(rhs),
            abs_residual=gap,
            rel_residual=rel,
            tolerance=tol,
            passed=True if tol is None else bool(rel <= tol),
        )
