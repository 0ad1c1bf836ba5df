"""Independence-preserving maps of the quadrirational family.

Every formula is evaluated exactly as a ratio of sums of positive terms, so
no cancellation occurs on the open quadrant. The array functions accept
numpy arrays of any matching shape; the PlanePoint wrappers validate the
domain first.
"""

import numpy as np

from ipverify.core.errors import DomainError, UnsupportedKindError
from ipverify.numerics.distributions import make_rng
from ipverify.schemas.ipmap import FabSpec, FaInfSpec, FaZeroSpec, FInfBSpec, MapSpec, PlanePoint

Pair = tuple[np.ndarray, np.ndarray]
INVOLUTIONS = ("fab", "fainf", "fazero")


def fab(alpha: float, beta: float, x: np.ndarray, y: np.ndarray) -> Pair:
    axy = alpha * beta * x * y
    u = (y / alpha) * (beta + alpha * x + beta * y + axy) / (1 + x + y + beta * x * y)
    v = (x / beta) * (alpha + alpha * x + beta * y + axy) / (1 + x + y + alpha * x * y)
    return u, v


def fa_inf(alpha: float, x: np.ndarray, y: np.ndarray) -> Pair:
    u = (1 + y + alpha * x * y) / (alpha * x)
    v = x * y * (1 + alpha * x) / (1 + x + y + alpha * x * y)
    return u, v


def finf_b(beta: float, x: np.ndarray, y: np.ndarray) -> Pair:
    """alpha -> infinity limit of fab."""
    u = x * y * (1 + beta * y) / (1 + x + y + beta * x * y)
    v = (1 + x + beta * x * y) / (beta * y)
    return u, v


def fa_zero(alpha: float, x: np.ndarray, y: np.ndarray) -> Pair:
    u = (1 + x + y) / (alpha * x * y)
    v = (1 + x + y + alpha * x * y) / (alpha * x * (1 + x))
    return u, v


def g_delta(delta: float, x: np.ndarray, y: np.ndarray) -> Pair:
    d = delta - 1.0
    u = (1 - x * y) / (1 + d * x * y)
    v = (1 - x) * (1 + d * x * y) / ((1 + d * x) * (1 - x * y))
    return u, v


def map_arrays(spec: MapSpec, x: np.ndarray, y: np.ndarray) -> Pair:
    if isinstance(spec, FabSpec):
        return fab(spec.alpha, spec.beta, x, y)
    if isinstance(spec, FaInfSpec):
        return fa_inf(spec.alpha, x, y)
    if isinstance(spec, FInfBSpec):
        return finf_b(spec.beta, x, y)
    if isinstance(spec, FaZeroSpec):
        return fa_zero(spec.alpha, x, y)
    return g_delta(spec.delta, x, y)


def check_domain(spec: MapSpec, x: np.ndarray, y: np.ndarray) -> None:
    xs, ys = np.asarray(x), np.asarray(y)
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys)) and np.all(xs > 0) and np.all(ys > 0)):
        raise DomainError(f"{spec.kind} needs finite positive coordinates")
    if spec.unit_square and not (np.all(xs < 1) and np.all(ys < 1)):
        raise DomainError("gdelta is defined on the open unit square")


def apply_map(spec: MapSpec, pt: PlanePoint) -> PlanePoint:
    check_domain(spec, np.asarray(pt.x), np.asarray(pt.y))
    u, v = map_arrays(spec, np.asarray(pt.x), np.asarray(pt.y))
    return PlanePoint(x=float(u), y=float(v))


def invariant_arrays(spec: MapSpec, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Conserved triple; on an image point (u, v) the last two entries trade places."""
    i1 = x * y / ((1 + x) * (1 + y))
    if isinstance(spec, FabSpec):
        i2 = spec.alpha * x / ((1 + spec.alpha * x) * (1 + y))
        i3 = spec.beta * y / ((1 + x) * (1 + spec.beta * y))
        return i1, i2, i3
    if isinstance(spec, FaInfSpec):
        i2 = spec.alpha * x / ((1 + spec.alpha * x) * (1 + y))
        return i1, i2, 1 / (1 + x)
    raise UnsupportedKindError(f"no invariant triple for map kind {spec.kind}")


def invariant_triple(spec: MapSpec, pt: PlanePoint) -> tuple[float, float, float]:
    check_domain(spec, np.asarray(pt.x), np.asarray(pt.y))
    i1, i2, i3 = invariant_arrays(spec, np.asarray(pt.x), np.asarray(pt.y))
    return float(i1), float(i2), float(i3)


def jacobian_arrays(spec: MapSpec, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """|det| of the derivative of the inverse map at (u, v)."""
    if isinstance(spec, FaInfSpec):
        a = spec.alpha
        return (1 + a * u) * (1 + v + a * u * v) / (a * u * (1 + u + v + a * u * v))
    if isinstance(spec, FaZeroSpec):
        a = spec.alpha
        return (1 + u + v) * (1 + u + v + a * u * v) / (a**2 * u**3 * (1 + u) * v**2)
    raise UnsupportedKindError(f"no closed-form Jacobian for map kind {spec.kind}")


def jacobian_closed(spec: MapSpec, pt: PlanePoint) -> float:
    check_domain(spec, np.asarray(pt.x), np.asarray(pt.y))
    return float(jacobian_arrays(spec, np.asarray(pt.x), np.asarray(pt.y)))


def inverse_jacobian_numeric(spec: MapSpec, u: np.ndarray, v: np.ndarray, rel_step: float = 1e-5) -> np.ndarray:
    """Central-difference |det| of the inverse; the supported maps are involutions."""
    if spec.kind not in INVOLUTIONS:
        raise UnsupportedKindError(f"map kind {spec.kind} is not an involution")
    hu, hv = rel_step * u, rel_step * v
    fu_p, gu_p = map_arrays(spec, u + hu, v)
    fu_m, gu_m = map_arrays(spec, u - hu, v)
    fv_p, gv_p = map_arrays(spec, u, v + hv)
    fv_m, gv_m = map_arrays(spec, u, v - hv)
    dfdu, dgdu = (fu_p - fu_m) / (2 * hu), (gu_p - gu_m) / (2 * hu)
    dfdv, dgdv = (fv_p - fv_m) / (2 * hv), (gv_p - gv_m) / (2 * hv)
    return np.abs(dfdu * dgdv - dfdv * dgdu)


def _h(x: np.ndarray) -> np.ndarray:
    return x / (1 - x)


def _g(y: np.ndarray) -> np.ndarray:
    return y / (1 + y)


def conjugate_fg_arrays(delta: float, x: np.ndarray, y: np.ndarray) -> Pair:
    g1, g2 = g_delta(delta, _g(x / delta), _g(1 / y))
    return delta * _h(g1), 1 / _h(g2)


def conjugate_fg(delta: float, pt: PlanePoint) -> PlanePoint:
    """fainf with alpha = 1/delta, written through gdelta and the bijection h: (0,1) -> (0,inf)."""
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    u, v = conjugate_fg_arrays(delta, np.asarray(pt.x), np.asarray(pt.y))
    return PlanePoint(x=float(u), y=float(v))


def conjugate_zero_inf_arrays(alpha: float, x: np.ndarray, y: np.ndarray) -> Pair:
    f1, f2 = fa_inf(1 / alpha, alpha * x, 1 / y)
    return f1 / alpha, 1 / f2


def conjugate_zero_inf(alpha: float, pt: PlanePoint) -> PlanePoint:
    """fazero written through fainf with parameter 1/alpha at (alpha x, 1/y)."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    u, v = conjugate_zero_inf_arrays(alpha, np.asarray(pt.x), np.asarray(pt.y))
    return PlanePoint(x=float(u), y=float(v))


def random_points(spec: MapSpec, n: int, seed: int, half_width: float = 1.5) -> Pair:
    """Log-uniform interior points; squashed through t/(1+t) for the unit square."""
    rng = make_rng(seed)
    x = np.exp(rng.uniform(-half_width, half_width, n))
    y = np.exp(rng.uniform(-half_width, half_width, n))
    if spec.unit_square:
        return _g(x), _g(y)
    return x, y
