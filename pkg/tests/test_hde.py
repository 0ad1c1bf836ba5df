"""
Difference equation, ladder, integral solutions and distribution recovery.
"""

import pytest

from ipverify.core.errors import DomainError
from ipverify.numerics.hde import (
    direct_moment,
    ell_from_model,
    ell_ladder,
    fit_solution,
    fitted,
    hde_residual,
    hde_spec_from_model,
    identification_residual,
    integral_solutions,
    ladder_depth,
    ladder_oracle,
    lattice_map,
    lu_alpha1,
    propagate,
    recovered_moment,
    theta_recurrence_residual,
    u_spec,
)
from ipverify.numerics.transforms import grid_points, l_closed_raw
from ipverify.schemas.hde import HdeSpec
from ipverify.schemas.transform import ModelQuad

LAM, A, B = 0.3, 1.5, 2.0


def test_normal_form_coefficients() -> None:
    """alpha = 2 gives ordered roots, alpha = 0.4 roots on both sides of zero"""
    spec = hde_spec_from_model(2.0, LAM, A, B)
    assert spec.rho1 == 1.0
    assert spec.rho2 == pytest.approx(2.0)
    assert spec.beta1 == pytest.approx(0.7)
    assert spec.beta2 == pytest.approx(-1.2)
    assert spec.beta3 == pytest.approx(1.8)
    assert spec.case == "ordered"
    assert hde_spec_from_model(0.4, LAM, A, B).case == "straddle"
    assert HdeSpec(rho1=1.0, rho2=1.0, beta1=0.0, beta2=0.0, beta3=1.0).case == "other"


def test_alpha_one_is_rejected() -> None:
    with pytest.raises(DomainError):
        hde_spec_from_model(1.0, LAM, A, B)
    with pytest.raises(DomainError):
        hde_spec_from_model(2.0, 1.6, A, B)


@pytest.mark.parametrize("alpha", [2.0, 0.4, 0.6, 5.0])
def test_transform_solves_the_equation(alpha: float) -> None:
    """x -> L_U(0, 0, x - b3) satisfies the difference equation on the lattice"""
    spec = hde_spec_from_model(alpha, LAM, A, B)
    ell = ell_from_model(alpha, LAM, A, B)
    for k in range(6):
        assert hde_residual(spec, ell, spec.beta3 + k, normalize=True) < 1e-9


def test_ladder_depth() -> None:
    assert ladder_depth(-1.2) == 2
    assert ladder_depth(0.5) == 1
    assert ladder_depth(-2.5) == 3
    spec = hde_spec_from_model(2.0, LAM, A, B)
    assert spec.lifted(2).beta2 == pytest.approx(-0.2)


@pytest.mark.parametrize("alpha", [2.0, 0.4, 0.6])
def test_ladder_matches_closed_form(alpha: float) -> None:
    """The n-th iterate is a scaled transform at shifted exponents and solves the lifted equation"""
    spec = hde_spec_from_model(alpha, LAM, A, B)
    ell = ell_from_model(alpha, LAM, A, B)
    n = ladder_depth(spec.beta2)
    ell_n = ell_ladder(ell, spec.rho2, n)
    for k in range(4):
        assert ell_n(spec.beta3 + k) == pytest.approx(ladder_oracle(alpha, LAM, A, B, n, float(k)), rel=1e-8)
        assert hde_residual(spec.lifted(n), ell_n, spec.beta3 + k, normalize=True) < 1e-9
    with pytest.raises(DomainError):
        ell_ladder(ell, spec.rho2, 0)


@pytest.mark.parametrize("alpha", [2.0, 0.4, 0.6])
def test_integral_solutions_solve_lifted_equation(alpha: float) -> None:
    lifted = hde_spec_from_model(alpha, LAM, A, B).lifted(2)
    for which in (0, 1):

        def sol(x: float, which: int = which) -> float:
            return integral_solutions(lifted, x)[which]

        for k in range(4):
            assert hde_residual(lifted, sol, lifted.beta3 + k, normalize=True) < 1e-8


def test_integral_solutions_domain() -> None:
    spec = hde_spec_from_model(2.0, LAM, A, B)
    with pytest.raises(DomainError):
        integral_solutions(spec, spec.beta3)
    straddle = hde_spec_from_model(0.4, LAM, A, B).lifted(2)
    with pytest.raises(DomainError):
        integral_solutions(straddle, straddle.beta3 + 0.5)


@pytest.mark.parametrize("alpha", [2.0, 0.4, 0.6])
def test_fit_and_recovery(alpha: float) -> None:
    """Only the first fundamental solution enters, and the fit reproduces the moments"""
    spec = hde_spec_from_model(alpha, LAM, A, B)
    n = ladder_depth(spec.beta2)
    lifted = spec.lifted(n)
    ell_n = ell_ladder(ell_from_model(alpha, LAM, A, B), spec.rho2, n)
    v0, v1 = ell_n(spec.beta3), ell_n(spec.beta3 + 1)
    coeffs = fit_solution(lifted, v0, v1)
    assert abs(coeffs.delta2) <= 1e-6 * abs(coeffs.delta1)
    assert fitted(lifted, coeffs)(spec.beta3 + 6) == pytest.approx(ell_n(spec.beta3 + 6), rel=1e-6)
    for k in (0, 3):
        expected = direct_moment(alpha, LAM, A, B, n, float(k))
        assert recovered_moment(alpha, n, coeffs, lifted, float(k)) == pytest.approx(expected, rel=1e-5)


def test_propagate_follows_transform() -> None:
    spec = hde_spec_from_model(2.0, LAM, A, B)
    ell = ell_from_model(2.0, LAM, A, B)
    values = propagate(spec, ell(spec.beta3), ell(spec.beta3 + 1), 6)
    assert len(values) == 7
    assert values[-1] == pytest.approx(ell(spec.beta3 + 6), rel=1e-6)


def test_alpha_one_closed_form() -> None:
    """alpha = 1 reduces to a beta ratio with a first-order recursion"""
    spec = u_spec(1.0, LAM, A, B)
    for x in (0.0, 1.0, 2.5):
        assert lu_alpha1(LAM, A, B, x) == pytest.approx(l_closed_raw(spec, 0.0, 0.0, x), rel=1e-10)
    assert lu_alpha1(LAM, A, B, 0.0) == pytest.approx(1.0)
    ratio = lu_alpha1(LAM, A, B, 2.0) / lu_alpha1(LAM, A, B, 1.0)
    assert ratio == pytest.approx((1.0 + A + LAM) / (1.0 + A + B), rel=1e-12)
    with pytest.raises(DomainError):
        lu_alpha1(LAM, A, B, -1.0)


def test_theta_recurrence(model: ModelQuad) -> None:
    for s in (0.0, 1.0, 2.0):
        for theta in (0.0, 1.0, 2.0):
            for sigma in (0.0, 1.0, 2.0):
                assert theta_recurrence_residual(model, s, theta, sigma, 1e-8).passed


def test_identification() -> None:
    """The mirrored triple matches exactly and a perturbed one does not"""
    points = grid_points([0.0, 1.0, 2.0])
    assert identification_residual(LAM, A, B, (-LAM, A, B), points) < 1e-12
    assert identification_residual(LAM, A, B, (-LAM + 0.1, A, B), points) > 1e-6
    assert identification_residual(LAM, A, B, (-LAM, A + 0.05, B - 0.05), points) > 1e-6


def test_lattice_map_keeps_order() -> None:
    assert lattice_map(lambda x: 2 * x, [3.0, 1.0, 2.0], workers=2) == [6.0, 2.0, 4.0]
