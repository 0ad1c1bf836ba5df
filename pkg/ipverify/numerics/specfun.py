import logging
import math
from functools import lru_cache

import numpy as np
from scipy.special import betaln, gammaln

from ipverify.core.config import settings
from ipverify.core.errors import DomainError
from ipverify.numerics.quadrature import tanh_sinh_log
from ipverify.schemas.quadrature import QuadratureConfig

logger = logging.getLogger(__name__)


def _require_positive(name: str, value: float) -> None:
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be a positive finite number, got {value}")


def log_gamma(x: float) -> float:
    _require_positive("x", x)
    return float(gammaln(x))


def log_beta(a: float, b: float) -> float:
    _require_positive("a", a)
    _require_positive("b", b)
    return float(betaln(a, b))


def beta_fn(a: float, b: float) -> float:
    return math.exp(log_beta(a, b))


def log_pochhammer(c: float, d: float) -> float:
    """log of (c)^(d) = Gamma(c + d) / Gamma(c)."""
    _require_positive("c", c)
    if d == 0:
        return 0.0
    _require_positive("c + d", c + d)
    return float(gammaln(c + d) - gammaln(c))


def pochhammer(c: float, d: float) -> float:
    if d == 0:
        _require_positive("c", c)
        return 1.0
    if float(d).is_integer() and 0 < d <= 64:
        _require_positive("c", c)
        return math.prod(c + j for j in range(int(d)))
    return math.exp(log_pochhammer(c, d))


def _check_domain(b: float, c: float, z: float) -> None:
    if not (math.isfinite(b) and math.isfinite(c) and 0 < b < c):
        raise DomainError(f"integral representation needs c > b > 0, got b={b}, c={c}")
    if not (math.isfinite(z) and z < 1):
        raise DomainError(f"integral representation needs z < 1, got z={z}")


def log_euler_integral(a: float, b: float, c: float, z: float, cfg: QuadratureConfig) -> float:
    """log of the integral of t^(b-1) (1-t)^(c-b-1) (1-zt)^(-a) over (0, 1)."""
    _check_domain(b, c, z)

    log1mz = math.log1p(-z)

    def log_f(t: np.ndarray, log_t: np.ndarray, log_1mt: np.ndarray) -> np.ndarray:
        base = (b - 1.0) * log_t + (c - b - 1.0) * log_1mt
        if a == 0 or z == 0:
            return base
        if z < 0:
            log_kernel = np.log1p(-z * t)
        else:
            # 1 - z t = (1 - t) + (1 - z) t, both terms positive
            log_kernel = np.logaddexp(log_1mt, log1mz + log_t)
        return base - a * log_kernel

    return tanh_sinh_log(log_f, 0.0, 1.0, cfg)


@lru_cache(maxsize=4096)
def _log_2f1_cached(a: float, b: float, c: float, z: float, cfg: QuadratureConfig) -> float:
    return log_euler_integral(a, b, c, z, cfg) - log_beta(b, c - b)


def log_gauss_2f1(a: float, b: float, c: float, z: float, cfg: QuadratureConfig | None = None) -> float:
    _check_domain(b, c, z)
    if z == 0 or a == 0:
        return 0.0
    return _log_2f1_cached(float(a), float(b), float(c), float(z), cfg or settings.quadrature())


def gauss_2f1(a: float, b: float, c: float, z: float, cfg: QuadratureConfig | None = None) -> float:
    """Gauss hypergeometric function for c > b > 0 and z < 1 via its Euler integral."""
    return math.exp(log_gauss_2f1(a, b, c, z, cfg))
