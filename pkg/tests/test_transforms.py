"""
Closed-form transform, its difference calculus, and the four-law identities.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from ipverify.core.errors import DomainError, EmptyBatchError, SingularSystemError
from ipverify.numerics.distributions import sample
from ipverify.numerics.specfun import beta_fn
from ipverify.numerics.transforms import (
    Boundary,
    ClosedForm,
    MonteCarlo,
    Swapped,
    delta2_op,
    delta_op,
    grid_points,
    l_closed,
    l_closed_raw,
    l_inf_closed,
    l_mc,
    m_fn,
    m_fn_differences,
    m_functions,
    moment_signature,
    phi_fn,
    ratio_pochhammer,
    residual_identities,
    residual_lindep,
    residual_lindep_boundary,
    residual_m_identities,
    residual_phi,
    residual_product_rule,
    residual_ratio,
    residual_w,
    role_specs,
)
from ipverify.schemas.distribution import B2Spec, GB2Spec
from ipverify.schemas.transform import ModelQuad, TransformPoint
from tests.oracles import transform_oracle

TOL = 1e-8
POINTS = grid_points([0.0, 0.5, 1.0, 2.0])


def test_l_closed_at_origin_is_one(gb2: GB2Spec) -> None:
    assert l_closed(gb2, TransformPoint(s=0, theta=0, sigma=0)) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("s,theta,sigma", [(1.0, 0.5, 0.5), (0.0, 2.0, 1.0), (-0.5, 1.0, 0.5), (2.5, 0.0, 3.0)])
def test_l_closed_matches_oracle(gb2: GB2Spec, s: float, theta: float, sigma: float) -> None:
    """Closed form against direct high-precision integration of the expectation"""
    assert l_closed_raw(gb2, s, theta, sigma) == pytest.approx(transform_oracle(gb2, s, theta, sigma), rel=1e-9)


def test_l_closed_unit_scale_is_beta_ratio() -> None:
    """With gamma = 1 the transform is B(q+nu+s+theta, p-nu+sigma) / B(q+nu, p-nu)"""
    spec = GB2Spec(nu=-0.3, p=1.5, q=2.0, gamma=1.0)
    expected = beta_fn(1.7 + 1.5, 1.8 + 2.0) / beta_fn(1.7, 1.8)
    assert l_closed_raw(spec, 1.0, 0.5, 2.0) == pytest.approx(expected, rel=1e-12)


def test_l_closed_divergence(gb2: GB2Spec) -> None:
    with pytest.raises(DomainError):
        l_closed_raw(gb2, -3.0, 0.0, 0.0)


def test_l_inf_closed() -> None:
    """E[W^s / (1+W)^(s+sigma)] for B2(a, b) is B(s+a, sigma+b) / B(a, b)"""
    spec = B2Spec(a=0.5, b=1.2)
    assert l_inf_closed(spec, 0.0, 0.0) == pytest.approx(1.0)
    assert l_inf_closed(spec, 1.0, 2.0) == pytest.approx(beta_fn(1.5, 3.2) / beta_fn(0.5, 1.2), rel=1e-13)
    with pytest.raises(DomainError):
        l_inf_closed(spec, -1.0, 0.0)


def test_transform_point_admissible_set() -> None:
    with pytest.raises(ValidationError):
        TransformPoint(s=-2.0, theta=1.0, sigma=3.0)
    with pytest.raises(ValidationError):
        TransformPoint(s=0.0, theta=-1.0, sigma=0.0)


def test_grid_points_filter() -> None:
    """Points with s + theta < 0 or s + sigma < 0 are dropped"""
    pts = grid_points([-1.0, 0.0, 1.0])
    tuples = {p.as_tuple() for p in pts}
    assert (-1.0, 1.0, 1.0) in tuples
    assert (-1.0, 0.0, 1.0) not in tuples
    assert all(p.theta >= 0 and p.sigma >= 0 for p in pts)


@pytest.mark.parametrize("pt", POINTS[::3], ids=lambda p: str(p.as_tuple()))
def test_linear_identities_closed_form(gb2: GB2Spec, pt: TransformPoint) -> None:
    """Two-term identities and difference forms hold for the closed form"""
    ev = ClosedForm(spec=gb2)
    records = residual_identities(ev, pt, TOL) + residual_w(ev, pt, TOL)
    assert {r.identity for r in records} == {"id1", "id2", "D1D2L", "ddL", "ddL_diff", "W_theta", "W_sigma"}
    failed = [r for r in records if not r.passed]
    assert not failed, failed


def test_linear_identities_boundary() -> None:
    """Infinite-scale transform: no ddL_diff, and theta is inert"""
    ev = Boundary(spec=B2Spec(a=0.5, b=1.8))
    pt = TransformPoint(s=1.0, theta=0.5, sigma=2.0)
    records = residual_identities(ev, pt, TOL) + residual_w(ev, pt, TOL)
    assert "ddL_diff" not in {r.identity for r in records}
    assert all(r.passed for r in records)
    assert delta_op(ev, "theta", pt) == 0.0
    with pytest.raises(DomainError):
        residual_phi(ev, pt, TOL)


def test_delta_ops(gb2: GB2Spec) -> None:
    ev = ClosedForm(spec=gb2)
    pt = TransformPoint(s=1.0, theta=0.0, sigma=1.0)
    expected = l_closed_raw(gb2, 1, 1, 2) - l_closed_raw(gb2, 1, 1, 1) - l_closed_raw(gb2, 1, 0, 2)
    expected += l_closed_raw(gb2, 1, 0, 1)
    assert delta2_op(ev, pt) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(DomainError):
        delta_op(ev, "s", pt)  # type: ignore[arg-type]


def test_m_function_forms_agree(gb2: GB2Spec) -> None:
    """Cross-ratio and difference forms of M coincide; phi equals (gamma - 1) M"""
    ev = ClosedForm(spec=gb2)
    for pt in POINTS[::4]:
        assert m_fn(ev, pt) == pytest.approx(m_fn_differences(ev, pt), rel=1e-8)
        assert phi_fn(ev, pt) == pytest.approx((gb2.gamma - 1.0) * m_fn(ev, pt), rel=1e-8)
        assert all(r.passed for r in residual_phi(ev, pt, TOL))


class _Zero:
    gamma = 2.0
    exact = False

    def value(self, s: float, theta: float, sigma: float) -> float:
        return 0.0


def test_m_function_singular() -> None:
    with pytest.raises(SingularSystemError):
        m_fn(_Zero(), TransformPoint(s=1.0, theta=0.0, sigma=0.0))


def test_swapped_evaluator(gb2: GB2Spec) -> None:
    ev = Swapped(inner=ClosedForm(spec=gb2))
    assert ev.value(1.0, 2.0, 0.5) == l_closed_raw(gb2, 1.0, 0.5, 2.0)
    assert ev.gamma == gb2.gamma and ev.exact


def test_role_specs(model: ModelQuad) -> None:
    roles = role_specs(model)
    assert roles["X"] == GB2Spec(nu=0.3, p=1.5, q=2.0, gamma=2.0)
    assert roles["Y"] == GB2Spec(nu=-0.3, p=1.5, q=2.0, gamma=0.5)
    assert roles["U"] == GB2Spec(nu=-0.3, p=1.5, q=2.0, gamma=2.0)
    assert roles["V"] == GB2Spec(nu=0.3, p=1.5, q=2.0, gamma=0.5)
    assert role_specs(model, "V", 0.1)["V"].nu == pytest.approx(0.4)
    with pytest.raises(DomainError):
        role_specs(model, "X", 5.0)


def test_lindep_holds(model: ModelQuad) -> None:
    """Factorisation across the four laws on the default grid"""
    records = [residual_lindep(model, pt, TOL) for pt in POINTS]
    assert max(r.rel_residual for r in records) < TOL


def test_lindep_detects_perturbed_role(model: ModelQuad) -> None:
    roles = role_specs(model, "Y", 0.05)
    records = [residual_lindep(model, pt, TOL, roles) for pt in POINTS]
    assert any(not r.passed for r in records)


def test_lindep_boundary(model: ModelQuad) -> None:
    """Infinite-beta factorisation with B2 partners"""
    assert all(residual_lindep_boundary(model, pt, TOL).passed for pt in POINTS if pt.s >= 0)
    with pytest.raises(DomainError):
        residual_lindep_boundary(ModelQuad(lam=0.3, a=2.0, b=1.5), POINTS[0], TOL)


def test_ratio_pochhammer_hand_values(model: ModelQuad) -> None:
    """(b+lam)(1)/(b-lam)(1) at unit s; all four factors at unit theta and sigma"""
    assert ratio_pochhammer(model, TransformPoint(s=0, theta=0, sigma=0)) == pytest.approx(1.0)
    assert ratio_pochhammer(model, TransformPoint(s=1, theta=0, sigma=0)) == pytest.approx(2.3 / 1.7)
    expected = 1.2 * 2.3 / (1.8 * 1.7)
    assert ratio_pochhammer(model, TransformPoint(s=0, theta=1, sigma=1)) == pytest.approx(expected)


@pytest.mark.parametrize("gamma", [0.25, 1.0, 3.0, 10.0])
def test_ratio_is_scale_free(model: ModelQuad, gamma: float) -> None:
    assert all(residual_ratio(model, pt, gamma, TOL).passed for pt in POINTS[::2])


def test_m_identities(model: ModelQuad) -> None:
    """Product and weighted-sum laws hold; alpha' M_X - beta' M_V stays away from zero"""
    for pt in POINTS[::5]:
        records, gap = residual_m_identities(model, pt, TOL)
        assert all(r.passed for r in records), records
        assert abs(gap) > 1e-6
    m = m_functions(model, POINTS[1])
    assert set(m) == {"X", "Y", "U", "V"}


def test_product_rule(model: ModelQuad) -> None:
    roles = role_specs(model)
    g, h = ClosedForm(spec=roles["X"]), Swapped(inner=ClosedForm(spec=roles["Y"]))
    assert all(residual_product_rule(g, h, pt, TOL).passed for pt in POINTS[::3])


def test_monte_carlo_identities_exact(gb2: GB2Spec) -> None:
    """id1 and id2 hold per sample, so the shared-batch estimator satisfies them to rounding"""
    batch = sample(gb2, 20_000, seed=1)
    ev = MonteCarlo(batch=batch, scale=gb2.gamma)
    assert not ev.exact
    for pt in POINTS[::6]:
        records = [r for r in residual_identities(ev, pt, 1e-12) if r.identity in ("id1", "id2")]
        assert all(r.passed for r in records), records


@pytest.mark.slow
def test_monte_carlo_matches_closed_form(gb2: GB2Spec) -> None:
    """Sample mean within 4 standard errors of the closed form"""
    batch = sample(gb2, 1_000_000, seed=20240601)
    pt = TransformPoint(s=1.0, theta=0.5, sigma=0.5)
    mean, se = l_mc(batch, gb2.gamma, pt)
    assert abs(mean - l_closed(gb2, pt)) <= 4 * se


def test_moment_signature(gb2: GB2Spec) -> None:
    batch = sample(gb2, 5000, seed=3)
    sig = moment_signature(batch, gb2.gamma, k_max=4)
    means = [m for m, _ in sig]
    assert len(sig) == 4
    assert all(0 < b < a for a, b in zip(means, means[1:]))


def test_l_mc_empty_batch(gb2: GB2Spec) -> None:
    batch = sample(gb2, 10, seed=3)
    empty = batch.model_copy(update={"values": np.empty(0)})
    with pytest.raises(EmptyBatchError):
        l_mc(empty, gb2.gamma, TransformPoint(s=0, theta=0, sigma=0))


def test_l_mc_infinite_scale() -> None:
    """gamma = inf drops the middle factor"""
    batch = sample(B2Spec(a=1.0, b=2.0), 1000, seed=8)
    w = batch.values
    mean, _ = l_mc(batch, math.inf, TransformPoint(s=1.0, theta=5.0, sigma=1.0))
    assert mean == pytest.approx(float(np.mean(w / (1 + w) ** 2)), rel=1e-12)
