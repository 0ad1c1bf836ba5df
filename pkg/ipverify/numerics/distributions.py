"""Densities, normalizers, exact samplers and CDFs for GB2, B2, GB1 and B1.

All four families reduce to one kernel on the unit interval,

    t^(b-1) (1-t)^(c-b-1) (1-zt)^(-a),

through t = x/(1+x) for the second-kind laws and t = x for the first-kind
laws. Normalizers, CDFs and moments are integrals of that kernel.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Literal, TextIO

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.interpolate import PchipInterpolator
from scipy.special import betainc

from ipverify.core.config import settings
from ipverify.core.errors import DomainError, UnsupportedKindError
from ipverify.numerics.quadrature import tanh_sinh_log
from ipverify.numerics.specfun import log_beta, log_gauss_2f1
from ipverify.schemas.distribution import B1Spec, B2Spec, DistSpec, GB1Spec, GB2Spec, dist_spec_adapter
from ipverify.schemas.quadrature import QuadratureConfig

logger = logging.getLogger(__name__)

CdfFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class UnitKernel:
    a: float
    b: float
    c: float
    z: float


def unit_kernel(spec: DistSpec) -> UnitKernel:
    if isinstance(spec, GB2Spec):
        return UnitKernel(a=spec.p + spec.nu, b=spec.q + spec.nu, c=spec.p + spec.q, z=1.0 - spec.gamma)
    if isinstance(spec, GB1Spec):
        return UnitKernel(a=-spec.r, b=spec.p, c=spec.p + spec.q, z=1.0 - spec.delta)
    return UnitKernel(a=0.0, b=spec.a, c=spec.a + spec.b, z=0.0)


def log_normalizer(spec: DistSpec, cfg: QuadratureConfig | None = None) -> float:
    k = unit_kernel(spec)
    return log_beta(k.b, k.c - k.b) + log_gauss_2f1(k.a, k.b, k.c, k.z, cfg)


def normalizer(spec: DistSpec, cfg: QuadratureConfig | None = None) -> float:
    return math.exp(log_normalizer(spec, cfg))


def log_density(spec: DistSpec, x: Any, cfg: QuadratureConfig | None = None) -> Any:
    """Log of the normalized density; -inf outside the support."""
    xs = np.asarray(x, dtype=float)
    log_z = log_normalizer(spec, cfg)
    upper = np.inf if spec.second_kind else 1.0
    inside = (xs > 0) & (xs < upper)
    safe = np.where(inside, xs, 0.5)

    with np.errstate(divide="ignore", invalid="ignore"):
        if isinstance(spec, GB2Spec):
            out = (
                (spec.q + spec.nu - 1.0) * np.log(safe)
                - (spec.p + spec.nu) * np.log1p(spec.gamma * safe)
                - (spec.q - spec.nu) * np.log1p(safe)
            )
        elif isinstance(spec, B2Spec):
            out = (spec.a - 1.0) * np.log(safe) - (spec.a + spec.b) * np.log1p(safe)
        elif isinstance(spec, GB1Spec):
            out = (
                (spec.p - 1.0) * np.log(safe)
                + (spec.q - 1.0) * np.log1p(-safe)
                + spec.r * np.log1p((spec.delta - 1.0) * safe)
            )
        else:
            out = (spec.a - 1.0) * np.log(safe) + (spec.b - 1.0) * np.log1p(-safe)

    result = np.where(inside, out - log_z, -np.inf)
    return float(result) if result.ndim == 0 else result


# Sampling


class SampleBatch(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    seed: int
    spec: DistSpec

    @field_validator("values")
    @classmethod
    def check_values(cls, v: np.ndarray) -> np.ndarray:
        if v.ndim != 1:
            raise ValueError("values must be one-dimensional")
        return v

    def __len__(self) -> int:
        return int(self.values.size)

    def to_csv(self, path: Path | str | TextIO) -> None:
        header = f'{{"spec": {self.spec.model_dump_json()}, "seed": {self.seed}}}\nvalue'
        np.savetxt(path, self.values, fmt="%.17g", header=header, comments="# ")

    @classmethod
    def from_csv(cls, path: Path | str) -> "SampleBatch":
        with open(path, encoding="utf-8") as fh:
            meta = json.loads(fh.readline().lstrip("#").strip())
        values = np.loadtxt(path, comments="#", ndmin=1)
        return cls(values=values, seed=meta["seed"], spec=dist_spec_adapter.validate_python(meta["spec"]))


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Counter-based generator; identical seeds give identical streams on every platform."""
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seq))


def _beta2(rng: np.random.Generator, a: float, b: float, size: int) -> np.ndarray:
    return rng.standard_gamma(a, size) / rng.standard_gamma(b, size)


def _beta1(rng: np.random.Generator, a: float, b: float, size: int) -> np.ndarray:
    ga = rng.standard_gamma(a, size)
    gb = rng.standard_gamma(b, size)
    return ga / (ga + gb)


def _rejection(
    rng: np.random.Generator,
    size: int,
    propose: Callable[[int], np.ndarray],
    log_accept: Callable[[np.ndarray], np.ndarray],
) -> tuple[np.ndarray, float]:
    kept: list[np.ndarray] = []
    have = 0
    drawn = 0
    rate = 0.5
    while have < size:
        m = int(math.ceil((size - have) / max(rate, 1e-3) * 1.1)) + 16
        x = propose(m)
        # accept when E > -log(acc), E standard exponential
        accepted = x[rng.standard_exponential(m) > -log_accept(x)]
        drawn += m
        have += accepted.size
        kept.append(accepted)
        rate = max(have / drawn, 1e-3)
    return np.concatenate(kept)[:size], have / drawn


def _draw_chunk(spec: DistSpec, size: int, seq: np.random.SeedSequence) -> tuple[np.ndarray, float]:
    rng = make_rng(seq)
    if isinstance(spec, B2Spec):
        return _beta2(rng, spec.a, spec.b, size), 1.0
    if isinstance(spec, B1Spec):
        return _beta1(rng, spec.a, spec.b, size), 1.0
    if isinstance(spec, GB2Spec):
        k = spec.p + spec.nu
        shift = min(0.0, k * math.log(spec.gamma))
        return _rejection(
            rng,
            size,
            lambda m: _beta2(rng, spec.q + spec.nu, spec.p - spec.nu, m),
            lambda x: k * (np.log1p(x) - np.log1p(spec.gamma * x)) + shift,
        )
    if isinstance(spec, GB1Spec):
        bound = max(0.0, spec.r * math.log(spec.delta))
        return _rejection(
            rng,
            size,
            lambda m: _beta1(rng, spec.p, spec.q, m),
            lambda x: spec.r * np.log1p((spec.delta - 1.0) * x) - bound,
        )
    raise UnsupportedKindError(f"no sampler for {spec!r}")


def sample(
    spec: DistSpec,
    n: int,
    seed: int,
    chunk_size: int | None = None,
    workers: int | None = None,
) -> SampleBatch:
    """Draw n exact i.i.d. variates; output depends only on (spec, n, seed, chunk_size)."""
    if n < 1:
        raise DomainError(f"sample size must be at least 1, got {n}")
    chunk = chunk_size or settings.SAMPLE_CHUNK_SIZE
    sizes = [min(chunk, n - start) for start in range(0, n, chunk)]
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    with ThreadPoolExecutor(max_workers=workers or settings.MAX_WORKERS) as pool:
        parts = list(pool.map(lambda args: _draw_chunk(spec, *args), zip(sizes, children)))

    values = np.concatenate([p[0] for p in parts])
    rate = sum(p[1] * s for p, s in zip(parts, sizes)) / n
    logger.debug("sampled %d from %s in %d chunks, acceptance %.4f", n, spec.label(), len(sizes), rate)
    return SampleBatch(values=values, seed=seed, spec=spec)


# CDFs and moments


def _to_unit(spec: DistSpec, x: float) -> tuple[float, float, float]:
    """Map x to t on (0, 1); returns (t, log t, log(1 - t))."""
    if spec.second_kind:
        return x / (1.0 + x), math.log(x) - math.log1p(x), -math.log1p(x)
    return x, math.log(x), math.log1p(-x)


def _log_kernel_between(
    k: UnitKernel, log_lo: float, log_1m_hi: float, lo: float, hi: float, cfg: QuadratureConfig
) -> float:
    """log of the kernel integral over [lo, hi], given log(lo) and log(1 - hi) exactly."""
    log1mz = math.log1p(-k.z)

    def log_f(t: np.ndarray, log_dlo: np.ndarray, log_dhi: np.ndarray) -> np.ndarray:
        log_t = np.logaddexp(log_lo, log_dlo)
        log_1mt = np.logaddexp(log_1m_hi, log_dhi)
        out = (k.b - 1.0) * log_t + (k.c - k.b - 1.0) * log_1mt
        if k.a != 0 and k.z != 0:
            if k.z < 0:
                out = out - k.a * np.log1p(-k.z * t)
            else:
                out = out - k.a * np.logaddexp(log_1mt, log1mz + log_t)
        return out

    return tanh_sinh_log(log_f, lo, hi, cfg)


def cdf_numeric(spec: DistSpec, x: float, cfg: QuadratureConfig | None = None) -> float:
    cfg = cfg or settings.quadrature()
    if x <= 0:
        return 0.0
    if math.isinf(x) or (not spec.second_kind and x >= 1):
        return 1.0

    k = unit_kernel(spec)
    log_z = log_beta(k.b, k.c - k.b) + log_gauss_2f1(k.a, k.b, k.c, k.z, cfg)
    t, log_t, log_1mt = _to_unit(spec, x)
    if t <= 0.5:
        lower = _log_kernel_between(k, -math.inf, log_1mt, 0.0, t, cfg)
        return min(1.0, math.exp(lower - log_z))
    upper = _log_kernel_between(k, log_t, -math.inf, t, 1.0, cfg)
    return max(0.0, -math.expm1(upper - log_z))


@lru_cache(maxsize=64)
def _tabulated_cdf(spec: DistSpec, size: int, cfg: QuadratureConfig) -> PchipInterpolator:
    k = unit_kernel(spec)
    angles = 0.5 * math.pi * np.arange(size + 1) / size
    nodes = np.sin(angles) ** 2
    log_nodes = 2.0 * np.log(np.sin(angles[1:]))
    log_tails = 2.0 * np.log(np.cos(angles[:-1]))

    cells = np.empty(size)
    for j in range(size):
        log_lo = -math.inf if j == 0 else float(log_nodes[j - 1])
        log_1m_hi = -math.inf if j == size - 1 else float(log_tails[j + 1])
        cells[j] = _log_kernel_between(k, log_lo, log_1m_hi, float(nodes[j]), float(nodes[j + 1]), cfg)

    weights = np.exp(cells - cells.max())
    cumulative = np.concatenate([[0.0], np.cumsum(weights)])
    cumulative /= cumulative[-1]
    # interpolate against the base beta CDF; the remaining factor is smooth and bounded
    base = betainc(k.b, k.c - k.b, nodes)
    base, keep = np.unique(base, return_index=True)
    return PchipInterpolator(base, cumulative[keep], extrapolate=False)


def cdf_evaluator(spec: DistSpec, cfg: QuadratureConfig | None = None, table_size: int | None = None) -> CdfFn:
    """Vectorised CDF for goodness-of-fit tests on large samples."""
    cfg = cfg or settings.quadrature()

    def to_unit(xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if spec.second_kind:
            with np.errstate(invalid="ignore"):
                t = np.where(np.isinf(xs), 1.0, xs / (1.0 + xs))
        else:
            t = xs
        return np.clip(t, 0.0, 1.0)

    if isinstance(spec, (B2Spec, B1Spec)):
        return lambda xs: betainc(spec.a, spec.b, to_unit(xs))

    table = _tabulated_cdf(spec, table_size or settings.CDF_TABLE_SIZE, cfg)
    k = unit_kernel(spec)
    return lambda xs: np.clip(table(betainc(k.b, k.c - k.b, to_unit(xs))), 0.0, 1.0)


def mean_numeric(spec: DistSpec, cfg: QuadratureConfig | None = None) -> float:
    """E[W]; second-kind laws need c - b > 1 for a finite mean."""
    k = unit_kernel(spec)
    log_z = log_beta(k.b, k.c - k.b) + log_gauss_2f1(k.a, k.b, k.c, k.z, cfg)
    if spec.second_kind:
        if k.c - k.b <= 1:
            raise DomainError(f"{spec.label()} has no finite mean")
        log_m = log_beta(k.b + 1, k.c - k.b - 1) + log_gauss_2f1(k.a, k.b + 1, k.c, k.z, cfg)
    else:
        log_m = log_beta(k.b + 1, k.c - k.b) + log_gauss_2f1(k.a, k.b + 1, k.c + 1, k.z, cfg)
    return math.exp(log_m - log_z)


# Law transformations


def rescale_gb2(spec: GB2Spec) -> GB2Spec:
    """Law of gamma * W for W ~ GB2(nu, p, q; gamma)."""
    half = 0.5 * (spec.p + spec.q)
    return GB2Spec(nu=0.5 * (spec.q - spec.p), p=half - spec.nu, q=half + spec.nu, gamma=1.0 / spec.gamma)


def reciprocal_b2(spec: B2Spec) -> B2Spec:
    return B2Spec(a=spec.b, b=spec.a)


def gb2_limit_b2(spec: GB2Spec, which: Literal["one", "zero"]) -> B2Spec:
    """B2 law equal to GB2 at gamma = 1, or its limit as gamma -> 0 (needs nu < 0)."""
    if which == "one":
        return B2Spec(a=spec.q + spec.nu, b=spec.p - spec.nu)
    if spec.nu >= 0:
        raise DomainError(f"gamma -> 0 limit needs nu < 0, got nu={spec.nu}")
    return B2Spec(a=spec.q + spec.nu, b=-2.0 * spec.nu)
