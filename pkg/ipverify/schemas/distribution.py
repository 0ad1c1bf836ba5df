from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator


class DistBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def second_kind(self) -> bool:
        """Support is (0, inf) for second-kind laws and (0, 1) otherwise."""
        return self.kind in ("gb2", "b2")  # type: ignore[attr-defined,no-any-return]

    def label(self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in self.model_dump().items() if k != "kind")
        return f"{self.kind.upper()}({params})"  # type: ignore[attr-defined]


class GB2Spec(DistBase):
    kind: Literal["gb2"] = "gb2"
    nu: float = Field(..., description="Location-type exponent, -q < nu < p")
    p: float = Field(..., gt=0, description="Exponent of the (1 + gamma x) factor offset")
    q: float = Field(..., gt=0, description="Exponent of the x factor offset")
    gamma: float = Field(..., gt=0, description="Scale inside the (1 + gamma x) factor")

    @model_validator(mode="after")
    def check_nu_range(self) -> "GB2Spec":
        if not -self.q < self.nu < self.p:
            raise ValueError(f"GB2 requires -q < nu < p, got nu={self.nu}, p={self.p}, q={self.q}")
        return self


class B2Spec(DistBase):
    kind: Literal["b2"] = "b2"
    a: float = Field(..., gt=0, description="Shape of the numerator gamma variate")
    b: float = Field(..., gt=0, description="Shape of the denominator gamma variate")


class GB1Spec(DistBase):
    kind: Literal["gb1"] = "gb1"
    p: float = Field(..., gt=0, description="Exponent offset of x")
    q: float = Field(..., gt=0, description="Exponent offset of (1 - x)")
    r: float = Field(..., description="Exponent of (1 + (delta - 1) x)")
    delta: float = Field(..., gt=0, description="Scale inside the (1 + (delta - 1) x) factor")


class B1Spec(DistBase):
    kind: Literal["b1"] = "b1"
    a: float = Field(..., gt=0)
    b: float = Field(..., gt=0)


DistSpec = Annotated[Union[GB2Spec, B2Spec, GB1Spec, B1Spec], Field(discriminator="kind")]

dist_spec_adapter: TypeAdapter[DistSpec] = TypeAdapter(DistSpec)
