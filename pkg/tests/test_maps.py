"""
Pointwise properties of the independence-preserving maps.
"""

import numpy as np
import pytest

from ipverify.core.errors import DomainError, UnsupportedKindError
from ipverify.numerics.maps import (
    apply_map,
    conjugate_fg,
    conjugate_fg_arrays,
    conjugate_zero_inf,
    conjugate_zero_inf_arrays,
    fa_inf,
    fa_zero,
    fab,
    finf_b,
    g_delta,
    inverse_jacobian_numeric,
    invariant_arrays,
    invariant_triple,
    jacobian_arrays,
    jacobian_closed,
    map_arrays,
    random_points,
)
from ipverify.schemas.ipmap import FabSpec, FaInfSpec, FaZeroSpec, FInfBSpec, GdeltaSpec, MapSpec, PlanePoint


@pytest.fixture
def points() -> tuple[np.ndarray, np.ndarray]:
    return random_points(FabSpec(alpha=2.0, beta=0.5), 2000, seed=9)


def test_fab_hand_value() -> None:
    """fab with alpha=1, beta=2 sends (1, 1) to (7/5, 3/4)"""
    image = apply_map(FabSpec(alpha=1.0, beta=2.0), PlanePoint(x=1.0, y=1.0))
    assert image.x == pytest.approx(1.4, rel=1e-15)
    assert image.y == pytest.approx(0.75, rel=1e-15)


@pytest.mark.parametrize(
    "spec",
    [FabSpec(alpha=2.0, beta=0.5), FabSpec(alpha=0.3, beta=5.0), FaInfSpec(alpha=2.0), FaZeroSpec(alpha=0.7)],
    ids=lambda s: s.label(),
)
def test_involution(spec: MapSpec, points: tuple[np.ndarray, np.ndarray]) -> None:
    """Applying the map twice returns the starting point"""
    x, y = points
    u, v = map_arrays(spec, x, y)
    xx, yy = map_arrays(spec, u, v)
    np.testing.assert_allclose(xx, x, rtol=1e-12)
    np.testing.assert_allclose(yy, y, rtol=1e-12)


@pytest.mark.parametrize("spec", [FabSpec(alpha=2.0, beta=0.5), FaInfSpec(alpha=3.0)], ids=lambda s: s.label())
def test_invariant_triple_conserved(spec: MapSpec, points: tuple[np.ndarray, np.ndarray]) -> None:
    """First invariant is kept, the other two trade places"""
    x, y = points
    u, v = map_arrays(spec, x, y)
    i1, i2, i3 = invariant_arrays(spec, x, y)
    j1, j2, j3 = invariant_arrays(spec, u, v)
    np.testing.assert_allclose(j1, i1, rtol=1e-12)
    np.testing.assert_allclose(j2, i3, rtol=1e-12)
    np.testing.assert_allclose(j3, i2, rtol=1e-12)


def test_invariant_triple_point_and_unsupported() -> None:
    i1, _, i3 = invariant_triple(FaInfSpec(alpha=1.0), PlanePoint(x=1.0, y=1.0))
    assert i1 == pytest.approx(0.25)
    assert i3 == pytest.approx(0.5)
    with pytest.raises(UnsupportedKindError):
        invariant_triple(FaZeroSpec(alpha=1.0), PlanePoint(x=1.0, y=1.0))


def test_limits_of_fab(points: tuple[np.ndarray, np.ndarray]) -> None:
    """Large alpha gives finf_b, large beta gives fa_inf"""
    x, y = points
    for got, want in zip(fab(1e8, 0.5, x, y), finf_b(0.5, x, y)):
        np.testing.assert_allclose(got, want, rtol=1e-6)
    for got, want in zip(fab(2.0, 1e8, x, y), fa_inf(2.0, x, y)):
        np.testing.assert_allclose(got, want, rtol=1e-6)


def test_finf_b_through_spec(points: tuple[np.ndarray, np.ndarray]) -> None:
    x, y = points
    u, v = map_arrays(FInfBSpec(beta=0.5), x, y)
    np.testing.assert_allclose(u, finf_b(0.5, x, y)[0])
    np.testing.assert_allclose(v, finf_b(0.5, x, y)[1])


def test_fg_conjugation(points: tuple[np.ndarray, np.ndarray]) -> None:
    """gdelta conjugated to the quadrant is fainf with alpha = 1/delta"""
    x, y = points
    for delta in (0.5, 2.0):
        for got, want in zip(conjugate_fg_arrays(delta, x, y), fa_inf(1.0 / delta, x, y)):
            np.testing.assert_allclose(got, want, rtol=1e-11)
    pt = conjugate_fg(2.0, PlanePoint(x=1.0, y=2.0))
    u, v = fa_inf(0.5, np.asarray(1.0), np.asarray(2.0))
    assert pt.x == pytest.approx(float(u), rel=1e-12)
    assert pt.y == pytest.approx(float(v), rel=1e-12)


def test_zero_inf_conjugation(points: tuple[np.ndarray, np.ndarray]) -> None:
    """fazero is fainf with parameter 1/alpha at (alpha x, 1/y)"""
    x, y = points
    for got, want in zip(conjugate_zero_inf_arrays(2.0, x, y), fa_zero(2.0, x, y)):
        np.testing.assert_allclose(got, want, rtol=1e-11)
    pt = conjugate_zero_inf(2.0, PlanePoint(x=0.5, y=3.0))
    u, v = fa_zero(2.0, np.asarray(0.5), np.asarray(3.0))
    assert pt.x == pytest.approx(float(u), rel=1e-12)
    assert pt.y == pytest.approx(float(v), rel=1e-12)


def test_gdelta_one_closed_form() -> None:
    """delta = 1 reduces to (1 - xy, (1 - x)/(1 - xy))"""
    x, y = random_points(GdeltaSpec(delta=1.0), 500, seed=4)
    assert np.all((x > 0) & (x < 1) & (y > 0) & (y < 1))
    u, v = g_delta(1.0, x, y)
    np.testing.assert_allclose(u, 1 - x * y, rtol=1e-14)
    np.testing.assert_allclose(v, (1 - x) / (1 - x * y), rtol=1e-14)


@pytest.mark.parametrize("spec", [FaInfSpec(alpha=2.0), FaZeroSpec(alpha=0.5)], ids=lambda s: s.label())
def test_jacobian_closed_form(spec: MapSpec, points: tuple[np.ndarray, np.ndarray]) -> None:
    """Closed-form Jacobian of the inverse agrees with central differences"""
    x, y = points
    u, v = map_arrays(spec, x, y)
    np.testing.assert_allclose(jacobian_arrays(spec, u, v), inverse_jacobian_numeric(spec, u, v), rtol=1e-6)
    assert jacobian_closed(spec, PlanePoint(x=1.0, y=1.0)) > 0


def test_jacobian_unsupported() -> None:
    with pytest.raises(UnsupportedKindError):
        jacobian_arrays(FabSpec(alpha=2.0, beta=0.5), np.ones(2), np.ones(2))
    with pytest.raises(UnsupportedKindError):
        inverse_jacobian_numeric(GdeltaSpec(delta=2.0), np.full(2, 0.5), np.full(2, 0.5))


def test_domain_checks() -> None:
    """gdelta lives on the open unit square"""
    with pytest.raises(DomainError):
        apply_map(GdeltaSpec(delta=2.0), PlanePoint(x=1.5, y=0.5))
    with pytest.raises(DomainError):
        conjugate_fg(-1.0, PlanePoint(x=1.0, y=1.0))
    image = apply_map(GdeltaSpec(delta=2.0), PlanePoint(x=0.5, y=0.5))
    assert 0 < image.x < 1 and 0 < image.y < 1
