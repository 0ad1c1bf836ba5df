from typing import Any

from pydantic import BaseModel, Field

from ipverify.schemas.transform import ResidualRecord


class SuiteSection(BaseModel):
    name: str
    records: list[ResidualRecord] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)


class SuiteReport(BaseModel):
    """Residual checks of one verification command, in deterministic order."""

    command: str
    config: dict[str, Any]
    sections: list[SuiteSection]
    diagnostics: dict[str, float] = Field(default_factory=dict)
    passed: bool = True

    def failures(self) -> list[str]:
        return [f"{s.name}/{r.identity}" for s in self.sections for r in s.records if not r.passed]

    def rows(self) -> list[dict[str, Any]]:
        return [
            {
                "section": s.name,
                "identity": r.identity,
                "point": " ".join(repr(v) for v in r.point),
                "lhs": r.lhs,
                "rhs": r.rhs,
                "abs_residual": r.abs_residual,
                "rel_residual": r.rel_residual,
                "tolerance": "" if r.tolerance is None else r.tolerance,
                "passed": int(r.passed),
            }
            for s in self.sections
            for r in s.records
        ]
