from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter


class MapBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def unit_square(self) -> bool:
        return self.kind == "gdelta"  # type: ignore[attr-defined,no-any-return]

    def label(self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in self.model_dump().items() if k != "kind")
        return f"{self.kind}({params})"  # type: ignore[attr-defined]


class FabSpec(MapBase):
    """Top of the hierarchy; alpha == beta is allowed for pointwise evaluation."""

    kind: Literal["fab"] = "fab"
    alpha: float = Field(..., gt=0)
    beta: float = Field(..., gt=0)


class FaInfSpec(MapBase):
    kind: Literal["fainf"] = "fainf"
    alpha: float = Field(..., gt=0)


class FInfBSpec(MapBase):
    kind: Literal["finfb"] = "finfb"
    beta: float = Field(..., gt=0)


class FaZeroSpec(MapBase):
    kind: Literal["fazero"] = "fazero"
    alpha: float = Field(..., gt=0)


class GdeltaSpec(MapBase):
    kind: Literal["gdelta"] = "gdelta"
    delta: float = Field(..., gt=0)


MapSpec = Annotated[Union[FabSpec, FaInfSpec, FInfBSpec, FaZeroSpec, GdeltaSpec], Field(discriminator="kind")]

map_spec_adapter: TypeAdapter[MapSpec] = TypeAdapter(MapSpec)


class PlanePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float = Field(..., gt=0, description="First coordinate, inside the map's domain")
    y: float = Field(..., gt=0, description="Second coordinate, inside the map's domain")
