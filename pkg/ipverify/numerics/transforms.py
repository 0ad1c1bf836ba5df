"""Hypergeometric-type Laplace transform

    L_W(s, theta, sigma) = E[(W/(1+W))^s (gW/(1+gW))^theta (1/(1+W))^sigma]

for a positive variable W and scale g, its closed form for GB2 laws, a Monte
Carlo estimator, and the difference calculus the independence argument runs
on. With g = inf the middle factor is dropped and theta plays no role.
"""

import logging
import math
from functools import lru_cache
from itertools import product
from typing import Literal, Optional, Protocol, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from ipverify.core.config import settings
from ipverify.core.errors import DomainError, EmptyBatchError, SingularSystemError
from ipverify.numerics.distributions import SampleBatch
from ipverify.numerics.specfun import log_beta, log_gauss_2f1, log_pochhammer
from ipverify.schemas.distribution import B2Spec, GB2Spec
from ipverify.schemas.quadrature import QuadratureConfig
from ipverify.schemas.transform import ModelQuad, ResidualRecord, Role, TransformPoint

logger = logging.getLogger(__name__)

Axis = Literal["theta", "sigma"]
M_FORM_TOL = 1e-8


# Closed forms


@lru_cache(maxsize=65536)
def _log_l_closed(spec: GB2Spec, s: float, theta: float, sigma: float, cfg: QuadratureConfig) -> float:
    nu, p, q, g = spec.nu, spec.p, spec.q, spec.gamma
    if s + theta + q + nu <= 0 or sigma + p - nu <= 0:
        raise DomainError(f"transform of {spec.label()} diverges at ({s}, {theta}, {sigma})")
    log_poch = (
        log_pochhammer(q + nu, s + theta) + log_pochhammer(p - nu, sigma) - log_pochhammer(p + q, s + theta + sigma)
    )
    z = 1.0 - g
    top = log_gauss_2f1(theta + p + nu, s + theta + q + nu, s + theta + sigma + p + q, z, cfg)
    bottom = log_gauss_2f1(p + nu, q + nu, p + q, z, cfg)
    return theta * math.log(g) + log_poch + top - bottom


def l_closed_raw(spec: GB2Spec, s: float, theta: float, sigma: float, cfg: QuadratureConfig | None = None) -> float:
    """Closed form at any exponents where the defining expectation converges."""
    return math.exp(_log_l_closed(spec, float(s), float(theta), float(sigma), cfg or settings.quadrature()))


def l_closed(spec: GB2Spec, pt: TransformPoint, cfg: QuadratureConfig | None = None) -> float:
    return l_closed_raw(spec, pt.s, pt.theta, pt.sigma, cfg)


def l_inf_closed(spec: B2Spec, s: float, sigma: float) -> float:
    """E[W^s / (1+W)^(s+sigma)] for W ~ B2(a, b)."""
    if s < 0 or sigma < 0:
        raise DomainError(f"boundary transform needs s, sigma >= 0, got ({s}, {sigma})")
    return math.exp(log_beta(s + spec.a, sigma + spec.b) - log_beta(spec.a, spec.b))


def l_mc(batch: SampleBatch, gamma: float, pt: TransformPoint) -> tuple[float, float]:
    """Sample mean of the transform integrand and its standard error."""
    return _mc_mean(batch.values, gamma, pt.s, pt.theta, pt.sigma)


def _mc_mean(w: np.ndarray, gamma: float, s: float, theta: float, sigma: float) -> tuple[float, float]:
    if w.size == 0:
        raise EmptyBatchError("cannot average over an empty batch")
    log_w = np.log(w)
    log1p_w = np.log1p(w)
    if math.isinf(gamma):
        log_terms = s * log_w - (s + sigma) * log1p_w
    else:
        log_terms = s * (log_w - log1p_w) - sigma * log1p_w
        if theta != 0:
            log_terms = log_terms + theta * (math.log(gamma) + log_w - np.log1p(gamma * w))
    terms = np.exp(log_terms)
    se = float(terms.std(ddof=1) / math.sqrt(w.size)) if w.size > 1 else math.nan
    return float(terms.mean()), se


# Evaluators


class TransformEvaluator(Protocol):
    @property
    def gamma(self) -> float: ...

    @property
    def exact(self) -> bool: ...

    def value(self, s: float, theta: float, sigma: float) -> float: ...


class ClosedForm(BaseModel):
    model_config = ConfigDict(frozen=True)

    spec: GB2Spec
    cfg: Optional[QuadratureConfig] = None

    @property
    def gamma(self) -> float:
        return self.spec.gamma

    @property
    def exact(self) -> bool:
        return True

    def value(self, s: float, theta: float, sigma: float) -> float:
        return l_closed_raw(self.spec, s, theta, sigma, self.cfg)


class Boundary(BaseModel):
    """Infinite-scale transform of a B2 law."""

    model_config = ConfigDict(frozen=True)

    spec: B2Spec

    @property
    def gamma(self) -> float:
        return math.inf

    @property
    def exact(self) -> bool:
        return True

    def value(self, s: float, theta: float, sigma: float) -> float:
        return l_inf_closed(self.spec, s, sigma)


class MonteCarlo(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    batch: SampleBatch
    scale: float

    @property
    def gamma(self) -> float:
        return self.scale

    @property
    def exact(self) -> bool:
        return False

    def value(self, s: float, theta: float, sigma: float) -> float:
        return _mc_mean(self.batch.values, self.scale, s, theta, sigma)[0]


class Swapped(BaseModel):
    """Evaluator with theta and sigma exchanged."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    inner: Union[ClosedForm, Boundary, MonteCarlo, "Swapped"]

    @property
    def gamma(self) -> float:
        return self.inner.gamma

    @property
    def exact(self) -> bool:
        return self.inner.exact

    def value(self, s: float, theta: float, sigma: float) -> float:
        return self.inner.value(s, sigma, theta)


Swapped.model_rebuild()


# Difference calculus


def _shift(pt: TransformPoint, ds: float = 0.0, dtheta: float = 0.0, dsigma: float = 0.0) -> tuple[float, float, float]:
    return (pt.s + ds, pt.theta + dtheta, pt.sigma + dsigma)


def delta_op(ev: TransformEvaluator, var: Axis, pt: TransformPoint) -> float:
    """Forward difference in theta or sigma; both shifts stay inside the admissible set."""
    if var == "theta":
        return ev.value(*_shift(pt, dtheta=1)) - ev.value(*pt.as_tuple())
    if var == "sigma":
        return ev.value(*_shift(pt, dsigma=1)) - ev.value(*pt.as_tuple())
    raise DomainError(f"unknown difference variable {var!r}")


def delta2_op(ev: TransformEvaluator, pt: TransformPoint) -> float:
    l00 = ev.value(*pt.as_tuple())
    l10 = ev.value(*_shift(pt, dtheta=1))
    l01 = ev.value(*_shift(pt, dsigma=1))
    l11 = ev.value(*_shift(pt, dtheta=1, dsigma=1))
    return l11 - l10 - l01 + l00


def m_fn_differences(ev: TransformEvaluator, pt: TransformPoint) -> float:
    """M written through differences: L * DtDs L / (Dt L * Ds L)."""
    denom = delta_op(ev, "theta", pt) * delta_op(ev, "sigma", pt)
    if denom == 0:
        raise SingularSystemError(f"vanishing differences at {pt.as_tuple()}")
    return ev.value(*pt.as_tuple()) * delta2_op(ev, pt) / denom


def m_fn(ev: TransformEvaluator, pt: TransformPoint) -> float:
    """Cross-ratio L(s,t,g) L(s,t+1,g+1) / (L(s+1,t,g) L(s-1,t+1,g+1))."""
    num = ev.value(*pt.as_tuple()) * ev.value(*_shift(pt, dtheta=1, dsigma=1))
    den = ev.value(*_shift(pt, ds=1)) * ev.value(*_shift(pt, ds=-1, dtheta=1, dsigma=1))
    if not den > 1e-300:
        raise SingularSystemError(f"M denominator vanishes at {pt.as_tuple()}; evaluator is not a transform")
    value = num / den
    if ev.exact and not math.isinf(ev.gamma):
        other = m_fn_differences(ev, pt)
        if abs(value - other) > M_FORM_TOL * abs(value):
            raise SingularSystemError(f"M forms disagree at {pt.as_tuple()}: {value!r} vs {other!r}")
    return value


def phi_fn(ev: TransformEvaluator, pt: TransformPoint) -> float:
    f = ev.value(*pt.as_tuple())
    dt = delta_op(ev, "theta", pt)
    ds = delta_op(ev, "sigma", pt)
    return f * (f + dt + ds) / (dt * ds)


def residual_identities(ev: TransformEvaluator, pt: TransformPoint, tol: float | None = None) -> list[ResidualRecord]:
    """Two-term linear identities and their difference forms, scaled by L at the point."""
    g = ev.gamma
    inv_g = 0.0 if math.isinf(g) else 1.0 / g
    point = pt.as_tuple()
    base = ev.value(*point)
    lower = ev.value(*_shift(pt, ds=-1, dtheta=1, dsigma=1))
    corner = ev.value(*_shift(pt, dtheta=1, dsigma=1))

    id1_rhs = ev.value(*_shift(pt, dtheta=1)) + inv_g * lower
    id2_rhs = ev.value(*_shift(pt, ds=1)) + ev.value(*_shift(pt, dsigma=1))
    d2 = delta2_op(ev, pt)
    lin = base + delta_op(ev, "theta", pt) + delta_op(ev, "sigma", pt)
    # (g - 1) DtDs L == (1 - 1/g) L(s, t+1, g+1), finite at g = inf
    dd_rhs = (1.0 - inv_g) * corner

    records = [
        ResidualRecord.from_sides("id1", point, base, id1_rhs, tol, scale=base),
        ResidualRecord.from_sides("id2", point, base, id2_rhs, tol, scale=base),
        ResidualRecord.from_sides("D1D2L", point, d2, inv_g * corner, tol, scale=base),
        ResidualRecord.from_sides("ddL", point, lin, dd_rhs, tol, scale=base),
    ]
    if not math.isinf(g):
        records.append(ResidualRecord.from_sides("ddL_diff", point, lin, (g - 1.0) * d2, tol, scale=base))
    return records


def residual_w(ev: TransformEvaluator, pt: TransformPoint, tol: float | None = None) -> list[ResidualRecord]:
    """Differences in theta and sigma as single shifted transforms."""
    point = pt.as_tuple()
    base = ev.value(*point)
    inv_g = 0.0 if math.isinf(ev.gamma) else 1.0 / ev.gamma
    return [
        ResidualRecord.from_sides(
            "W_theta",
            point,
            delta_op(ev, "theta", pt),
            -inv_g * ev.value(*_shift(pt, ds=-1, dtheta=1, dsigma=1)),
            tol,
            scale=base,
        ),
        ResidualRecord.from_sides(
            "W_sigma", point, delta_op(ev, "sigma", pt), -ev.value(*_shift(pt, ds=1)), tol, scale=base
        ),
    ]


def residual_phi(ev: TransformEvaluator, pt: TransformPoint, tol: float | None = None) -> list[ResidualRecord]:
    if math.isinf(ev.gamma):
        raise DomainError("phi is undefined for an infinite-scale transform")
    point = pt.as_tuple()
    m_def = m_fn(ev, pt)
    records = [ResidualRecord.from_sides("M_forms", point, m_def, m_fn_differences(ev, pt), tol)]
    phi_rhs = (ev.gamma - 1.0) * m_def
    records.append(ResidualRecord.from_sides("phi_M", point, phi_fn(ev, pt), phi_rhs, tol, scale=m_def))
    return records


def residual_product_rule(
    g: TransformEvaluator, h: TransformEvaluator, pt: TransformPoint, tol: float | None = None
) -> ResidualRecord:
    """Two-variable difference identity for the product g h."""
    point = pt.as_tuple()

    def gh(s: float, theta: float, sigma: float) -> float:
        return g.value(s, theta, sigma) * h.value(s, theta, sigma)

    prod0 = gh(*point)
    lhs = (gh(*_shift(pt, dtheta=1)) - prod0) * (gh(*_shift(pt, dsigma=1)) - prod0)

    gt, gs = delta_op(g, "theta", pt), delta_op(g, "sigma", pt)
    ht, hs = delta_op(h, "theta", pt), delta_op(h, "sigma", pt)
    g0, h0 = g.value(*point), h.value(*point)
    rhs = gt * gs * ht * hs * (1 + phi_fn(g, pt) + phi_fn(h, pt)) + g0 * h0 * (gt * hs + gs * ht)
    return ResidualRecord.from_sides("product_rule", point, lhs, rhs, tol, scale=prod0 * prod0)


def moment_signature(batch: SampleBatch, gamma: float, k_max: int = 8) -> list[tuple[float, float]]:
    """Transform at (k, 0, 0), k = 1..k_max: the moments of W/(1+W)."""
    return [_mc_mean(batch.values, gamma, float(k), 0.0, 0.0) for k in range(1, k_max + 1)]


# Model roles


def role_specs(model: ModelQuad, perturb_role: Role | None = None, perturb_lambda: float = 0.0) -> dict[str, GB2Spec]:
    """GB2 laws of X, Y, U, V; optionally shifts lam in one role."""
    lam = {r: model.lam for r in ("X", "Y", "U", "V")}
    if perturb_role is not None:
        lam[perturb_role] += perturb_lambda
    try:
        return {
            "X": GB2Spec(nu=lam["X"], p=model.a, q=model.b, gamma=model.alpha),
            "Y": GB2Spec(nu=-lam["Y"], p=model.a, q=model.b, gamma=model.beta),
            "U": GB2Spec(nu=-lam["U"], p=model.a, q=model.b, gamma=model.alpha),
            "V": GB2Spec(nu=lam["V"], p=model.a, q=model.b, gamma=model.beta),
        }
    except ValidationError as exc:
        raise DomainError(f"perturbed role {perturb_role} leaves the GB2 parameter range: {exc.errors()[0]['msg']}")


def residual_lindep(
    model: ModelQuad,
    pt: TransformPoint,
    tol: float | None = None,
    roles: dict[str, GB2Spec] | None = None,
    cfg: QuadratureConfig | None = None,
) -> ResidualRecord:
    """L_X(s,t,g) L_Y(s,g,t) against L_U(s,g,t) L_V(s,t,g)."""
    r = roles or role_specs(model)
    s, th, sg = pt.as_tuple()
    lhs = l_closed_raw(r["X"], s, th, sg, cfg) * l_closed_raw(r["Y"], s, sg, th, cfg)
    rhs = l_closed_raw(r["U"], s, sg, th, cfg) * l_closed_raw(r["V"], s, th, sg, cfg)
    return ResidualRecord.from_sides("Lindep", pt.as_tuple(), lhs, rhs, tol)


def boundary_role_specs(model: ModelQuad) -> dict[str, Union[GB2Spec, B2Spec]]:
    if not abs(model.lam) < model.a < model.b:
        raise DomainError(f"the infinite-beta roles need |lam| < a < b, got {model!r}")
    return {
        "X": GB2Spec(nu=model.lam, p=model.a, q=model.b, gamma=model.alpha),
        "Y": B2Spec(a=model.b - model.a, b=model.a + model.lam),
        "U": GB2Spec(nu=-model.lam, p=model.a, q=model.b, gamma=model.alpha),
        "V": B2Spec(a=model.b - model.a, b=model.a - model.lam),
    }


def residual_lindep_boundary(
    model: ModelQuad, pt: TransformPoint, tol: float | None = None, cfg: QuadratureConfig | None = None
) -> ResidualRecord:
    """Infinite-beta factorisation: L_X(s,t,g) L_Y(s,t) against L_U(s,g,t) L_V(s,g)."""
    r = boundary_role_specs(model)
    s, th, sg = pt.as_tuple()
    if s < 0:
        raise DomainError("the infinite-beta factorisation is checked for s >= 0")
    lhs = l_closed_raw(r["X"], s, th, sg, cfg) * l_inf_closed(r["Y"], s, th)  # type: ignore[arg-type]
    rhs = l_closed_raw(r["U"], s, sg, th, cfg) * l_inf_closed(r["V"], s, sg)  # type: ignore[arg-type]
    return ResidualRecord.from_sides("Lindep_boundary", pt.as_tuple(), lhs, rhs, tol)


def ratio_pochhammer(model: ModelQuad, pt: TransformPoint) -> float:
    lam, a, b = model.lam, model.a, model.b
    s, th, sg = pt.as_tuple()
    return math.exp(
        log_pochhammer(a - lam, sg)
        + log_pochhammer(b + lam, s + th)
        - log_pochhammer(a + lam, th)
        - log_pochhammer(b - lam, s + sg)
    )


def residual_ratio(
    model: ModelQuad, pt: TransformPoint, gamma: float, tol: float | None = None, cfg: QuadratureConfig | None = None
) -> ResidualRecord:
    """L_X(s,t,g) / L_U(s,g,t) at a common scale against the scale-free Pochhammer ratio."""
    x = GB2Spec(nu=model.lam, p=model.a, q=model.b, gamma=gamma)
    u = GB2Spec(nu=-model.lam, p=model.a, q=model.b, gamma=gamma)
    s, th, sg = pt.as_tuple()
    direct = l_closed_raw(x, s, th, sg, cfg) / l_closed_raw(u, s, sg, th, cfg)
    return ResidualRecord.from_sides(f"LX/LU[gamma={gamma!r}]", pt.as_tuple(), direct, ratio_pochhammer(model, pt), tol)


def m_functions(model: ModelQuad, pt: TransformPoint, roles: dict[str, GB2Spec] | None = None) -> dict[str, float]:
    r = roles or role_specs(model)
    return {
        "X": m_fn(ClosedForm(spec=r["X"]), pt),
        "Y": m_fn(Swapped(inner=ClosedForm(spec=r["Y"])), pt),
        "U": m_fn(Swapped(inner=ClosedForm(spec=r["U"])), pt),
        "V": m_fn(ClosedForm(spec=r["V"]), pt),
    }


def residual_m_identities(
    model: ModelQuad, pt: TransformPoint, tol: float | None = None, roles: dict[str, GB2Spec] | None = None
) -> tuple[list[ResidualRecord], float]:
    """Product and weighted-sum laws for the four M-functions, plus alpha' M_X - beta' M_V."""
    m = m_functions(model, pt, roles)
    a1, b1 = model.alpha - 1.0, model.beta - 1.0
    point = pt.as_tuple()
    records = [
        ResidualRecord.from_sides("prod1", point, m["X"] * m["Y"], m["U"] * m["V"], tol),
        ResidualRecord.from_sides(
            "sum",
            point,
            a1 * m["X"] + b1 * m["Y"],
            a1 * m["U"] + b1 * m["V"],
            tol,
            scale=abs(a1) * m["X"] + abs(b1) * m["Y"] or 1.0,
        ),
        ResidualRecord.from_sides("MX=MU", point, m["X"], m["U"], tol),
    ]
    return records, a1 * m["X"] - b1 * m["V"]


def grid_points(values: list[float]) -> list[TransformPoint]:
    """Product grid in (s, theta, sigma), kept where every shift used by M stays admissible."""
    pts = []
    for s, th, sg in product(values, repeat=3):
        if th < 0 or sg < 0 or s + th < 0 or s + sg < 0:
            continue
        pts.append(TransformPoint(s=s, theta=th, sigma=sg))
    return pts
