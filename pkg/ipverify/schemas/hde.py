from pydantic import BaseModel, ConfigDict, Field


class HdeSpec(BaseModel):
    """Normal-form coefficients of a second-order difference equation with linear coefficients."""

    model_config = ConfigDict(frozen=True)

    rho1: float = Field(..., description="First characteristic root")
    rho2: float = Field(..., description="Second characteristic root")
    beta1: float
    beta2: float
    beta3: float = Field(..., gt=0, description="Lattice origin: the equation is posed on beta3 + N0")

    def lifted(self, n: int) -> "HdeSpec":
        """Coefficients of the n-th ladder iterate (beta2 raised by n - 1)."""
        return self.model_copy(update={"beta2": self.beta2 + n - 1})

    @property
    def case(self) -> str:
        if self.rho2 < 0 < self.rho1:
            return "straddle"
        if 0 < self.rho1 < self.rho2:
            return "ordered"
        return "other"


class FitCoeffs(BaseModel):
    delta1: float
    delta2: float
    condition: float = Field(default=1.0, description="Condition number of the 2x2 system")
