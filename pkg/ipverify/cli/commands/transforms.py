import argparse
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

from ipverify.cli.deps import parse_grid, resolve
from ipverify.cli.output import append_summary, suite_summary_row, write_report
from ipverify.core.config import settings
from ipverify.core.errors import EXIT_FAILED, EXIT_OK
from ipverify.numerics.distributions import sample
from ipverify.numerics.transforms import (
    ClosedForm,
    MonteCarlo,
    Swapped,
    grid_points,
    l_closed,
    l_mc,
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
from ipverify.schemas.report import SuiteReport, SuiteSection
from ipverify.schemas.run_config import TransformsRunConfig
from ipverify.schemas.transform import ResidualRecord, TransformPoint

logger = logging.getLogger(__name__)

FLAGS = {
    "lam": "model.lam",
    "a": "model.a",
    "b": "model.b",
    "alpha": "model.alpha",
    "beta": "model.beta",
    "grid": "grid",
    "tolerance": "tolerance",
    "mc_samples": "mc_samples",
    "perturb_role": "perturb_role",
    "perturb_lambda": "perturb_lambda",
}
MC_IDENTITY_TOL = 1e-12


def register(sub: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]) -> None:
    p = sub.add_parser("verify-transforms", parents=parents, help="Residuals of the transform identities on a grid")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--grid", type=parse_grid, help="Comma-separated values for s, theta and sigma")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--mc-samples", type=int, help="Monte Carlo batch size; 0 skips sampling checks")
    p.add_argument("--perturb-role", choices=["X", "Y", "U", "V"])
    p.add_argument("--perturb-lambda", type=float)
    p.set_defaults(handler=cmd_verify_transforms)


def _per_point(
    points: list[TransformPoint], check: Callable[[TransformPoint], list[ResidualRecord]], workers: int
) -> list[ResidualRecord]:
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return [r for batch in pool.map(check, points) for r in batch]


def _tag(records: list[ResidualRecord], prefix: str) -> list[ResidualRecord]:
    return [r.model_copy(update={"identity": f"{prefix}:{r.identity}"}) for r in records]


def run_transforms_suite(cfg: TransformsRunConfig) -> SuiteReport:
    model, tol = cfg.model, cfg.tolerance
    workers = cfg.threads or settings.MAX_WORKERS
    points = grid_points(cfg.grid)
    roles = role_specs(model, cfg.perturb_role, cfg.perturb_lambda)
    logger.info("transform suite on %d grid points", len(points))

    identities: list[ResidualRecord] = []
    for role, spec in roles.items():
        ev = ClosedForm(spec=spec)
        identities += _tag(
            _per_point(points, lambda pt, ev=ev: residual_identities(ev, pt, tol) + residual_w(ev, pt, tol), workers),
            role,
        )
        identities += _tag(_per_point(points, lambda pt, ev=ev: residual_phi(ev, pt, tol), workers), role)

    lindep = _per_point(points, lambda pt: [residual_lindep(model, pt, tol, roles)], workers)
    ratio = _per_point(points, lambda pt: [residual_ratio(model, pt, g, tol) for g in cfg.gammas], workers)

    diagnostics: dict[str, float] = {}
    m_records: list[ResidualRecord] = []
    gaps = []
    for pt in points:
        recs, gap = residual_m_identities(model, pt, tol, roles)
        m_records += recs
        gaps.append(abs(gap))
    diagnostics["max_abs_alpha1_mx_minus_beta1_mv"] = max(gaps)

    x_ev, y_ev = ClosedForm(spec=roles["X"]), Swapped(inner=ClosedForm(spec=roles["Y"]))
    product = _per_point(points, lambda pt: [residual_product_rule(x_ev, y_ev, pt, tol)], workers)

    sections = [
        SuiteSection(name="identities", records=identities),
        SuiteSection(name="lindep", records=lindep),
        SuiteSection(name="ratio", records=ratio),
        SuiteSection(name="m_identities", records=m_records),
        SuiteSection(name="product_rule", records=product),
    ]
    if abs(model.lam) < model.a < model.b and cfg.perturb_role is None:
        boundary = _per_point(points, lambda pt: [residual_lindep_boundary(model, pt, tol)], workers)
        sections.append(SuiteSection(name="lindep_boundary", records=boundary))
    if cfg.mc_samples > 0:
        sections.append(_monte_carlo_section(cfg, points))

    for s in sections:
        worst = max((r.rel_residual for r in s.records), default=0.0)
        diagnostics[f"max_rel_{s.name}"] = worst
    report = SuiteReport(
        command="verify-transforms",
        config=cfg.model_dump(mode="json", by_alias=True),
        sections=sections,
        diagnostics=diagnostics,
    )
    return report.model_copy(update={"passed": all(s.passed for s in sections)})


def _monte_carlo_section(cfg: TransformsRunConfig, points: list[TransformPoint]) -> SuiteSection:
    spec = role_specs(cfg.model)["X"]
    batch = sample(spec, cfg.mc_samples, cfg.seed, workers=cfg.threads)
    ev = MonteCarlo(batch=batch, scale=spec.gamma)
    records = []
    for pt in points:
        mean, se = l_mc(batch, spec.gamma, pt)
        rec = ResidualRecord.from_sides("mc_vs_closed", pt.as_tuple(), mean, l_closed(spec, pt))
        limit = cfg.mc_sigmas * se
        records.append(rec.model_copy(update={"tolerance": limit, "passed": rec.abs_residual <= limit}))
        records += [r for r in residual_identities(ev, pt, MC_IDENTITY_TOL) if r.identity in ("id1", "id2")]
    return SuiteSection(name="monte_carlo", records=records)


def cmd_verify_transforms(args: argparse.Namespace) -> int:
    cfg = resolve(TransformsRunConfig, args, FLAGS)
    report = run_transforms_suite(cfg)
    write_report(report, report.rows(), cfg)
    if cfg.summary is not None:
        append_summary(cfg.summary, suite_summary_row(report))
    if not report.passed:
        logger.warning("failed checks: %s", ", ".join(report.failures()[:10]))
        return EXIT_FAILED
    return EXIT_OK
