"""Double-exponential (tanh-sinh) quadrature evaluated in log space.

Integrands receive each node together with the log distances to both
endpoints, so factors such as ``t**(b-1) * (1-t)**(c-b-1)`` can be formed
from ``log_dlo`` and ``log_dhi`` without the cancellation that ``1 - t``
suffers next to the right endpoint.
"""

import logging
import math
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from ipverify.core.errors import ConvergenceError, DomainError
from ipverify.schemas.quadrature import QuadratureConfig

logger = logging.getLogger(__name__)

# (x, log(x - lo), log(hi - x)) -> log f(x)
LogIntegrand = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]

T_MAX = 6.5
MIN_LEVELS = 3


def _level_nodes(level: int) -> tuple[np.ndarray, float]:
    """Abscissae t added at a refinement level and the step of that level."""
    h = 2.0**-level
    if level == 0:
        k = np.arange(-math.floor(T_MAX), math.floor(T_MAX) + 1, dtype=float)
        return k, h
    count = math.floor(T_MAX / h)
    k = np.arange(-count, count + 1, dtype=float)
    k = k[np.abs(k) % 2 == 1]
    return k * h, h


def _log_terms(log_f: LogIntegrand, t: np.ndarray, lo: float, hi: float) -> np.ndarray:
    u = 0.5 * math.pi * np.sinh(t)
    log_tau = -np.logaddexp(0.0, -2.0 * u)
    log_one_minus_tau = -np.logaddexp(0.0, 2.0 * u)
    log_width = math.log(hi - lo)
    log_dlo = log_width + log_tau
    log_dhi = log_width + log_one_minus_tau
    x = np.where(u <= 0, lo + np.exp(log_dlo), hi - np.exp(log_dhi))
    log_jac = log_width + np.log(math.pi * np.cosh(t)) + log_tau + log_one_minus_tau

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        values = np.asarray(log_f(x, log_dlo, log_dhi), dtype=float) + log_jac
    return np.where(np.isnan(values), -np.inf, values)


def tanh_sinh_log(log_f: LogIntegrand, lo: float, hi: float, cfg: QuadratureConfig) -> float:
    """Return log of the integral of exp(log_f) over (lo, hi)."""
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise DomainError(f"tanh-sinh needs a finite interval lo < hi, got ({lo}, {hi})")

    acc = -np.inf
    previous = None
    for level in range(max(cfg.max_subdivisions, MIN_LEVELS)):
        t, h = _level_nodes(level)
        acc = float(np.logaddexp(acc, logsumexp(_log_terms(log_f, t, lo, hi))))
        estimate = math.log(h) + acc if acc > -np.inf else -np.inf

        if previous is not None and level + 1 >= MIN_LEVELS:
            if estimate == -np.inf and previous == -np.inf:
                return estimate
            gap = abs(estimate - previous)
            if gap <= cfg.rel_tol or math.exp(estimate) * -math.expm1(-gap) <= cfg.abs_tol:
                logger.debug("tanh-sinh converged on (%g, %g) after %d levels", lo, hi, level + 1)
                return estimate
        previous = estimate

    raise ConvergenceError(
        f"tanh-sinh did not reach rel_tol={cfg.rel_tol} on ({lo}, {hi}) within {cfg.max_subdivisions} levels"
    )
