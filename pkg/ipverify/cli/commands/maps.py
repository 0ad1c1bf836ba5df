import argparse
import logging

import numpy as np

from ipverify.cli.deps import resolve
from ipverify.cli.output import append_summary, suite_summary_row, write_report
from ipverify.core.errors import EXIT_FAILED, EXIT_OK
from ipverify.numerics.maps import (
    conjugate_fg_arrays,
    conjugate_zero_inf_arrays,
    fa_inf,
    fa_zero,
    fab,
    finf_b,
    g_delta,
    inverse_jacobian_numeric,
    invariant_arrays,
    jacobian_arrays,
    map_arrays,
    random_points,
)
from ipverify.schemas.ipmap import FabSpec, FaInfSpec, FaZeroSpec, GdeltaSpec, MapSpec
from ipverify.schemas.report import SuiteReport, SuiteSection
from ipverify.schemas.run_config import MapsRunConfig
from ipverify.schemas.transform import ResidualRecord

logger = logging.getLogger(__name__)

FLAGS = {"alpha": "alpha", "beta": "beta", "delta": "delta", "points": "points", "tolerance": "tolerance"}
LIMIT_PARAM = 1e8
LIMIT_TOL = 1e-6


def register(sub: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]) -> None:
    p = sub.add_parser("verify-maps", parents=parents, help="Conservation, involution and Jacobian checks of the maps")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--points", type=int, help="Number of random interior points")
    p.add_argument("--tolerance", type=float)
    p.set_defaults(handler=cmd_verify_maps)


def worst_record(
    identity: str, x: np.ndarray, y: np.ndarray, lhs: np.ndarray, rhs: np.ndarray, tol: float
) -> ResidualRecord:
    """Record at the point with the largest relative gap."""
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    rel = np.abs(lhs - rhs) / np.where(scale > 0, scale, 1.0)
    i = int(np.argmax(rel))
    return ResidualRecord.from_sides(identity, (x[i], y[i]), float(lhs[i]), float(rhs[i]), tol)


Pair = tuple[np.ndarray, np.ndarray]


def _pair_records(name: str, x: np.ndarray, y: np.ndarray, got: Pair, want: Pair, tol: float) -> list[ResidualRecord]:
    return [
        worst_record(f"{name}[u]", x, y, got[0], want[0], tol),
        worst_record(f"{name}[v]", x, y, got[1], want[1], tol),
    ]


def _conservation(spec: MapSpec, x: np.ndarray, y: np.ndarray, tol: float) -> list[ResidualRecord]:
    u, v = map_arrays(spec, x, y)
    i1, i2, i3 = invariant_arrays(spec, x, y)
    j1, j2, j3 = invariant_arrays(spec, u, v)
    return [
        worst_record(f"{spec.kind}:I1", x, y, j1, i1, tol),
        worst_record(f"{spec.kind}:I2", x, y, j2, i3, tol),
        worst_record(f"{spec.kind}:I3", x, y, j3, i2, tol),
    ]


def _involution(spec: MapSpec, x: np.ndarray, y: np.ndarray, tol: float) -> list[ResidualRecord]:
    u, v = map_arrays(spec, x, y)
    return _pair_records(f"{spec.kind}:twice", x, y, map_arrays(spec, u, v), (x, y), tol)


def _jacobian(spec: MapSpec, x: np.ndarray, y: np.ndarray, tol: float) -> ResidualRecord:
    u, v = map_arrays(spec, x, y)
    closed, numeric = jacobian_arrays(spec, u, v), inverse_jacobian_numeric(spec, u, v)
    return worst_record(f"{spec.kind}:jacobian", u, v, closed, numeric, tol)


def run_maps_suite(cfg: MapsRunConfig) -> SuiteReport:
    alpha, beta, delta, tol = cfg.alpha, cfg.beta, cfg.delta, cfg.tolerance
    fab_spec = FabSpec(alpha=alpha, beta=beta)
    fainf_spec = FaInfSpec(alpha=alpha)
    fazero_spec = FaZeroSpec(alpha=alpha)
    x, y = random_points(fab_spec, cfg.points, cfg.seed)
    logger.info("map suite on %d points", cfg.points)

    conservation = _conservation(fab_spec, x, y, tol) + _conservation(fainf_spec, x, y, tol)
    involution = (
        _involution(fab_spec, x, y, tol) + _involution(fainf_spec, x, y, tol) + _involution(fazero_spec, x, y, tol)
    )
    conjugation = _pair_records("fg", x, y, conjugate_fg_arrays(delta, x, y), fa_inf(1.0 / delta, x, y), tol)
    conjugation += _pair_records("zero_inf", x, y, conjugate_zero_inf_arrays(alpha, x, y), fa_zero(alpha, x, y), tol)

    # delta = 1 closed form on the unit square
    sx, sy = random_points(GdeltaSpec(delta=delta), cfg.points, cfg.seed + 1)
    expected = (1 - sx * sy, (1 - sx) / (1 - sx * sy))
    conjugation += _pair_records("gdelta_one", sx, sy, g_delta(1.0, sx, sy), expected, tol)

    limits = _pair_records("finfb_limit", x, y, fab(LIMIT_PARAM, beta, x, y), finf_b(beta, x, y), LIMIT_TOL)
    limits += _pair_records("fainf_limit", x, y, fab(alpha, LIMIT_PARAM, x, y), fa_inf(alpha, x, y), LIMIT_TOL)

    jacobians = [
        _jacobian(fainf_spec, x, y, cfg.jacobian_tolerance),
        _jacobian(fazero_spec, x, y, cfg.jacobian_tolerance),
    ]

    sections = [
        SuiteSection(name="conservation", records=conservation),
        SuiteSection(name="involution", records=involution),
        SuiteSection(name="conjugation", records=conjugation),
        SuiteSection(name="limits", records=limits),
        SuiteSection(name="jacobian", records=jacobians),
    ]
    return SuiteReport(
        command="verify-maps",
        config=cfg.model_dump(mode="json", by_alias=True),
        sections=sections,
        diagnostics={f"max_rel_{s.name}": max(r.rel_residual for r in s.records) for s in sections},
        passed=all(s.passed for s in sections),
    )


def cmd_verify_maps(args: argparse.Namespace) -> int:
    cfg = resolve(MapsRunConfig, args, FLAGS)
    report = run_maps_suite(cfg)
    write_report(report, report.rows(), cfg)
    if cfg.summary is not None:
        append_summary(cfg.summary, suite_summary_row(report))
    if not report.passed:
        logger.warning("failed checks: %s", ", ".join(report.failures()))
        return EXIT_FAILED
    return EXIT_OK
