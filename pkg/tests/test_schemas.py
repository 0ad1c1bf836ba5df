"""
Validation rules of the configuration and report models.
"""

import pytest
from pydantic import ValidationError

from ipverify.core.config import Settings
from ipverify.schemas import (
    B1Spec,
    FabSpec,
    GB1Spec,
    GB2Spec,
    HdeRunConfig,
    HdeSpec,
    IpExperimentConfig,
    MapsRunConfig,
    ModelQuad,
    ResidualRecord,
    SuiteReport,
    SuiteSection,
    TransformsRunConfig,
    dist_spec_adapter,
    map_spec_adapter,
)


def test_gb2_parameter_range() -> None:
    """GB2 needs -q < nu < p and positive p, q, gamma"""
    GB2Spec(nu=-1.9, p=1.5, q=2.0, gamma=2.0)
    with pytest.raises(ValidationError):
        GB2Spec(nu=1.5, p=1.5, q=2.0, gamma=2.0)
    with pytest.raises(ValidationError):
        GB2Spec(nu=0.0, p=1.5, q=2.0, gamma=0.0)


def test_discriminated_unions() -> None:
    spec = dist_spec_adapter.validate_python({"kind": "gb1", "p": 1.0, "q": 2.0, "r": -1.0, "delta": 3.0})
    assert isinstance(spec, GB1Spec)
    assert spec.second_kind is False
    assert spec.label() == "GB1(p=1.0, q=2.0, r=-1.0, delta=3.0)"
    assert map_spec_adapter.validate_python({"kind": "fab", "alpha": 1.0, "beta": 2.0}) == FabSpec(alpha=1.0, beta=2.0)
    with pytest.raises(ValidationError):
        dist_spec_adapter.validate_python({"kind": "gamma", "a": 1.0})


def test_model_quad_lambda_bound() -> None:
    with pytest.raises(ValidationError):
        ModelQuad(lam=1.5, a=1.5, b=2.0)
    with pytest.raises(ValidationError):
        ModelQuad(lam=0.0, a=1.0, b=1.0, extra=1)  # type: ignore[call-arg]


def test_experiment_config_rules() -> None:
    """Subsample within n, distinct fab parameters, supports matching the map domain"""
    laws = {"law_x": GB2Spec(nu=0.3, p=1.5, q=2.0, gamma=2.0), "law_y": GB2Spec(nu=-0.3, p=1.5, q=2.0, gamma=0.5)}
    IpExperimentConfig(map=FabSpec(alpha=2.0, beta=0.5), n=1000, dcorr_subsample=1000, **laws)
    with pytest.raises(ValidationError):
        IpExperimentConfig(map=FabSpec(alpha=2.0, beta=0.5), n=1000, dcorr_subsample=2000, **laws)
    with pytest.raises(ValidationError):
        IpExperimentConfig(map=FabSpec(alpha=2.0, beta=2.0), **laws)
    with pytest.raises(ValidationError):
        IpExperimentConfig(map=FabSpec(alpha=2.0, beta=0.5), law_x=B1Spec(a=1.0, b=1.0), law_y=laws["law_y"])
    with pytest.raises(ValidationError):
        IpExperimentConfig(map=FabSpec(alpha=2.0, beta=0.5), n=500, **laws)


def test_run_configs() -> None:
    cfg = TransformsRunConfig.model_validate({"schema": 1, "model": {"lam": -0.2}, "grid": [0, 1]})
    assert cfg.model.lam == -0.2 and cfg.model.a == 1.5
    assert cfg.format == "json" and cfg.out is None
    with pytest.raises(ValidationError):
        TransformsRunConfig.model_validate({"schema": 2})
    with pytest.raises(ValidationError):
        MapsRunConfig(alpha=1.0, beta=1.0)
    with pytest.raises(ValidationError):
        HdeRunConfig(lam=2.0)


def test_residual_record_scaling() -> None:
    rec = ResidualRecord.from_sides("r", (1.0, 2.0), 1.0, 1.0 + 1e-9, tol=1e-8)
    assert rec.abs_residual == pytest.approx(1e-9)
    assert rec.rel_residual == pytest.approx(1e-9, rel=1e-6)
    assert rec.passed
    scaled = ResidualRecord.from_sides("r", (), 1e-3, 0.0, tol=1e-2, scale=1.0)
    assert scaled.rel_residual == pytest.approx(1e-3)
    assert scaled.passed
    assert not ResidualRecord.from_sides("r", (), 1.0, 2.0, tol=1e-3).passed
    assert ResidualRecord.from_sides("r", (), 0.0, 0.0, tol=1e-3).rel_residual == 0.0
    assert ResidualRecord.from_sides("r", (), 1.0, 2.0).passed


def test_suite_report_rows_and_failures() -> None:
    ok = ResidualRecord.from_sides("a", (0.0, 1.0), 1.0, 1.0, tol=1e-8)
    bad = ResidualRecord.from_sides("b", (0.5,), 1.0, 2.0, tol=1e-8)
    report = SuiteReport(
        command="verify-test",
        config={},
        sections=[SuiteSection(name="one", records=[ok]), SuiteSection(name="two", records=[ok, bad])],
    )
    assert report.sections[0].passed and not report.sections[1].passed
    assert report.failures() == ["two/b"]
    rows = report.rows()
    assert len(rows) == 3
    assert rows[0]["point"] == "0.0 1.0"
    assert rows[2]["passed"] == 0


def test_hde_spec_lifting() -> None:
    spec = HdeSpec(rho1=1.0, rho2=-0.5, beta1=0.2, beta2=-1.5, beta3=1.0)
    assert spec.case == "straddle"
    assert spec.lifted(3).beta2 == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        HdeSpec(rho1=1.0, rho2=2.0, beta1=0.0, beta2=0.0, beta3=0.0)


def test_settings_from_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("IPVERIFY_MAX_WORKERS", "7")
    monkeypatch.setenv("IPVERIFY_QUAD_REL_TOL", "1e-9")
    settings = Settings()
    assert settings.MAX_WORKERS == 7
    assert settings.quadrature().rel_tol == 1e-9
