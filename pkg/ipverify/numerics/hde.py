"""Second-order difference equations with linear coefficients.

The equation in normal form,

    (x+b1+b2+2) l(x+2) - ((r1+r2)(x+1) + b1 r2 + b2 r1) l(x+1) + r1 r2 x l(x) = 0,

is posed on the lattice b3 + N0. Its fundamental solutions are Euler-type
integrals between the roots 0, r1, r2; the sequence l(x) = L_U(0, 0, x - b3)
of a GB2 law solves one instance of it, and matching two initial values
against the fundamental pair identifies which combination it is.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np
from scipy.integrate import quad

from ipverify.core.config import settings
from ipverify.core.errors import DomainError, SingularSystemError
from ipverify.numerics.distributions import log_density
from ipverify.numerics.quadrature import tanh_sinh_log
from ipverify.numerics.specfun import log_beta
from ipverify.numerics.transforms import l_closed_raw, ratio_pochhammer
from ipverify.schemas.distribution import GB2Spec
from ipverify.schemas.hde import FitCoeffs, HdeSpec
from ipverify.schemas.quadrature import QuadratureConfig
from ipverify.schemas.transform import ModelQuad, ResidualRecord, TransformPoint

logger = logging.getLogger(__name__)

LatticeFn = Callable[[float], float]

LADDER_MARGIN = 0.05
MAX_CONDITION = 1e12
LATTICE_TOL = 1e-9


def _check_params(lam: float, a: float, b: float) -> None:
    if not (a > 0 and b > 0 and abs(lam) < min(a, b)):
        raise DomainError(f"need a, b > 0 and |lam| < min(a, b), got lam={lam}, a={a}, b={b}")


def u_spec(alpha: float, lam: float, a: float, b: float) -> GB2Spec:
    return GB2Spec(nu=-lam, p=a, q=b, gamma=alpha)


def hde_spec_from_model(alpha: float, lam: float, a: float, b: float) -> HdeSpec:
    _check_params(lam, a, b)
    if alpha == 1:
        raise DomainError("alpha = 1 degenerates to a first-order equation; use lu_alpha1")
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    return HdeSpec(rho1=1.0, rho2=alpha / (alpha - 1.0), beta1=b - lam - 1.0, beta2=lam - a, beta3=a + lam)


def ell_from_model(alpha: float, lam: float, a: float, b: float, cfg: QuadratureConfig | None = None) -> LatticeFn:
    """x -> L_U(0, 0, x - b3) for U ~ GB2(-lam, a, b; alpha)."""
    spec = u_spec(alpha, lam, a, b)
    beta3 = a + lam

    def ell(x: float) -> float:
        return l_closed_raw(spec, 0.0, 0.0, x - beta3, cfg)

    return ell


def hde_terms(spec: HdeSpec, ell: LatticeFn, x: float) -> tuple[float, float, float]:
    r1, r2 = spec.rho1, spec.rho2
    t2 = (x + spec.beta1 + spec.beta2 + 2.0) * ell(x + 2)
    t1 = -((r1 + r2) * (x + 1.0) + spec.beta1 * r2 + spec.beta2 * r1) * ell(x + 1)
    t0 = r1 * r2 * x * ell(x)
    return t2, t1, t0


def hde_residual(spec: HdeSpec, ell: LatticeFn, x: float, normalize: bool = False) -> float:
    t2, t1, t0 = hde_terms(spec, ell, x)
    res = t2 + t1 + t0
    if not normalize:
        return res
    size = abs(t2) + abs(t1) + abs(t0)
    return abs(res) / size if size > 0 else 0.0


def ell_ladder(ell: LatticeFn, rho2: float, n: int) -> LatticeFn:
    """n-th iterate of l(x) -> l(x+1) - rho2 l(x); n = 1 returns l."""
    if n < 1:
        raise DomainError(f"ladder index must be at least 1, got {n}")
    if n == 1:
        return ell
    lower = ell_ladder(ell, rho2, n - 1)

    def step(x: float) -> float:
        return lower(x + 1) - rho2 * lower(x)

    return step


def ladder_oracle(alpha: float, lam: float, a: float, b: float, n: int, x: float) -> float:
    """Closed form of the n-th ladder value at b3 + x."""
    spec = u_spec(alpha, lam, a, b)
    factor = (alpha / (1.0 - alpha)) ** (n - 1)
    return factor * l_closed_raw(spec, n - 1.0, 1.0 - n, x)


def ladder_depth(beta2: float, margin: float = LADDER_MARGIN) -> int:
    n = 1
    while beta2 + n - 1 <= -1.0 + margin:
        n += 1
    return n


def _lattice_index(spec: HdeSpec, x: float) -> int:
    k = x - spec.beta3
    if abs(k - round(k)) > LATTICE_TOL or round(k) < 0:
        raise DomainError(f"x={x} is not on the lattice {spec.beta3} + N0")
    return int(round(k))


def integral_solutions(spec: HdeSpec, x: float, cfg: QuadratureConfig | None = None) -> tuple[float, float]:
    """The fundamental pair (l1, l2) at x by tanh-sinh quadrature."""
    return _integral_solutions(spec, float(x), cfg or settings.quadrature())


@lru_cache(maxsize=4096)
def _integral_solutions(spec: HdeSpec, x: float, cfg: QuadratureConfig) -> tuple[float, float]:
    if spec.beta1 <= -1 or spec.beta2 <= -1:
        raise DomainError(f"integral solutions need beta1, beta2 > -1; lift the equation first (beta2={spec.beta2})")
    if not x > 0:
        raise DomainError(f"integral solutions need x > 0, got {x}")
    r1, r2, b1, b2 = spec.rho1, spec.rho2, spec.beta1, spec.beta2
    xm1 = x - 1.0

    if spec.case == "straddle":
        sign = -1.0 if _lattice_index(spec, x) % 2 else 1.0
        log_mr2 = math.log(-r2)
        log_r1 = math.log(r1)

        def f1(t: np.ndarray, log_dlo: np.ndarray, log_dhi: np.ndarray) -> np.ndarray:
            # on (0, r1): t - r2 = t + |r2|
            return xm1 * log_dlo + b1 * log_dhi + b2 * np.logaddexp(log_dlo, log_mr2)

        def f2(t: np.ndarray, log_dlo: np.ndarray, log_dhi: np.ndarray) -> np.ndarray:
            # on (r2, 0): -t is the distance to 0, r1 - t = r1 + |t|
            return xm1 * log_dhi + b1 * np.logaddexp(log_r1, log_dhi) + b2 * log_dlo

        l1 = math.exp(tanh_sinh_log(f1, 0.0, r1, cfg))
        l2 = sign * math.exp(tanh_sinh_log(f2, r2, 0.0, cfg))
        return l1, l2

    if spec.case == "ordered":
        log_gap = math.log(r2 - r1)
        log_r1 = math.log(r1)

        def g1(t: np.ndarray, log_dlo: np.ndarray, log_dhi: np.ndarray) -> np.ndarray:
            return xm1 * log_dlo + b1 * log_dhi + b2 * np.logaddexp(log_gap, log_dhi)

        def g2(t: np.ndarray, log_dlo: np.ndarray, log_dhi: np.ndarray) -> np.ndarray:
            return xm1 * np.logaddexp(log_r1, log_dlo) + b1 * log_dlo + b2 * log_dhi

        return math.exp(tanh_sinh_log(g1, 0.0, r1, cfg)), math.exp(tanh_sinh_log(g2, r1, r2, cfg))

    raise DomainError(f"no integral representation for roots rho1={r1}, rho2={r2}")


def fit_solution(spec: HdeSpec, v0: float, v1: float, cfg: QuadratureConfig | None = None) -> FitCoeffs:
    """Coefficients of the fundamental pair matching (l(b3), l(b3+1))."""
    s0 = integral_solutions(spec, spec.beta3, cfg)
    s1 = integral_solutions(spec, spec.beta3 + 1.0, cfg)
    mat = np.array([[s0[0], s0[1]], [s1[0], s1[1]]])
    cond = float(np.linalg.cond(mat))
    if not math.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularSystemError(f"fundamental matrix is singular (condition {cond:.3g})")
    if cond > 1e8:
        logger.warning("near-singular fundamental matrix, condition %.3g", cond)
    d1, d2 = np.linalg.solve(mat, np.array([v0, v1]))
    return FitCoeffs(delta1=float(d1), delta2=float(d2), condition=cond)


def fitted(spec: HdeSpec, coeffs: FitCoeffs, cfg: QuadratureConfig | None = None) -> LatticeFn:
    def combo(x: float) -> float:
        l1, l2 = integral_solutions(spec, x, cfg)
        return coeffs.delta1 * l1 + coeffs.delta2 * l2

    return combo


def propagate(spec: HdeSpec, v0: float, v1: float, k_max: int) -> list[float]:
    """Forward recursion from l(b3) = v0, l(b3+1) = v1 up to l(b3+k_max)."""
    values = [v0, v1]
    r1, r2 = spec.rho1, spec.rho2
    for k in range(k_max - 1):
        x = spec.beta3 + k
        lead = x + spec.beta1 + spec.beta2 + 2.0
        if lead == 0:
            raise SingularSystemError(f"leading coefficient vanishes at x={x}")
        mid = (r1 + r2) * (x + 1.0) + spec.beta1 * r2 + spec.beta2 * r1
        values.append((mid * values[-1] - r1 * r2 * x * values[-2]) / lead)
    return values[: k_max + 1]


def lu_alpha1(lam: float, a: float, b: float, x: float) -> float:
    """L_U(0, 0, x) for alpha = 1, a beta ratio."""
    _check_params(lam, a, b)
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    return math.exp(log_beta(b - lam, a + lam + x) - log_beta(b - lam, a + lam))


def direct_moment(alpha: float, lam: float, a: float, b: float, n: int, x: float) -> float:
    """E[(1 + alpha U)^(n-1) / (1 + U)^(x+n-1)] for U ~ GB2(-lam, a, b; alpha), by adaptive quadrature."""
    spec = u_spec(alpha, lam, a, b)

    def integrand(w: float) -> float:
        log_w = (n - 1) * math.log1p(alpha * w) - (x + n - 1) * math.log1p(w)
        return math.exp(log_w + float(log_density(spec, w)))

    lower, _ = quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-11, limit=200)
    upper, _ = quad(integrand, 1.0, math.inf, epsabs=0.0, epsrel=1e-11, limit=200)
    return lower + upper


def recovered_moment(alpha: float, n: int, coeffs: FitCoeffs, spec: HdeSpec, x: float) -> float:
    """Moment reconstructed from the fitted combination at b3 + x."""
    return (1.0 - alpha) ** (n - 1) * fitted(spec, coeffs)(spec.beta3 + x)


def theta_recurrence_residual(
    model: ModelQuad, s: float, theta: float, sigma: float, tol: float | None = None
) -> ResidualRecord:
    """Three-term recurrence in theta for L_U at swapped exponents."""
    lam, a, b, alpha = model.lam, model.a, model.b, model.alpha
    spec = u_spec(alpha, lam, a, b)

    def n1(z: float) -> float:
        return z + b + lam

    def n2(z: float) -> float:
        return z + a - lam

    def n3(z: float) -> float:
        return z + a + lam

    def lu(t: float) -> float:
        return l_closed_raw(spec, s, sigma, t)

    k = 1.0 - alpha
    lhs = (n1(s + theta) + n2(sigma) - k * (n1(s + theta + 1) + n3(theta))) * lu(theta + 1)
    rhs = alpha * n3(theta) * lu(theta) - k * n1(s + theta + 1) * lu(theta + 2)
    scale = max(abs(lhs), abs(alpha * n3(theta) * lu(theta)), abs(k * n1(s + theta + 1) * lu(theta + 2)))
    return ResidualRecord.from_sides("theta_recurrence", (s, theta, sigma), lhs, rhs, tol, scale=scale)


def identification_residual(
    lam: float, a: float, b: float, other: tuple[float, float, float], points: Iterable[TransformPoint]
) -> float:
    """Largest relative gap between the scale-free ratio of (lam, a, b) and its mirrored form for another triple."""
    lam2, a2, b2 = other
    base = ModelQuad(lam=lam, a=a, b=b)
    mirror = ModelQuad(lam=-lam2, a=a2, b=b2)
    worst = 0.0
    for pt in points:
        r0 = ratio_pochhammer(base, pt)
        r1 = ratio_pochhammer(mirror, pt)
        worst = max(worst, abs(r0 - r1) / max(abs(r0), abs(r1)))
    return worst


def lattice_map(fn: LatticeFn, xs: list[float], workers: int | None = None) -> list[float]:
    """Evaluate fn on lattice points in parallel, results in input order."""
    with ThreadPoolExecutor(max_workers=workers or settings.MAX_WORKERS) as pool:
        return list(pool.map(fn, xs))
