"""Small helpers: draw a sample, evaluate a density, apply a map at one point."""

import argparse
import io
import logging
import math

from ipverify.cli.deps import dist_override, flag_overrides, map_override, merge, read_config_file, validate
from ipverify.cli.output import emit
from ipverify.core.errors import EXIT_OK
from ipverify.numerics.distributions import log_density, sample
from ipverify.numerics.maps import apply_map
from ipverify.schemas.run_config import DensityRunConfig, MapEvalRunConfig, SampleRunConfig

logger = logging.getLogger(__name__)

DIST_KINDS = ["gb2", "b2", "gb1", "b1"]
MAP_KINDS = ["fab", "fainf", "finfb", "fazero", "gdelta"]


def _dist_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dist", choices=DIST_KINDS)
    for name in ("nu", "p", "q", "gamma", "a", "b", "r", "delta"):
        p.add_argument(f"--{name}", type=float)


def register(sub: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]) -> None:
    p = sub.add_parser("sample", parents=parents, help="Draw an exact sample as CSV")
    _dist_flags(p)
    p.add_argument("--n", type=int, help="Sample size")
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("density", parents=parents, help="Normalized density at one point")
    _dist_flags(p)
    p.add_argument("--x", type=float)
    p.set_defaults(handler=cmd_density)

    p = sub.add_parser("map-eval", parents=parents, help="Image of one point under a map")
    p.add_argument("--map", choices=MAP_KINDS)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.set_defaults(handler=cmd_map_eval)


def cmd_sample(args: argparse.Namespace) -> int:
    data = merge(read_config_file(args.config), flag_overrides(args, {"n": "n"}))
    cfg = validate(SampleRunConfig, dist_override(data, args))
    batch = sample(cfg.dist, cfg.n, cfg.seed, workers=cfg.threads)
    buf = io.StringIO()
    batch.to_csv(buf)
    emit(buf.getvalue(), cfg.out)
    logger.info("drew %d values from %s", len(batch), cfg.dist.label())
    return EXIT_OK


def cmd_density(args: argparse.Namespace) -> int:
    data = merge(read_config_file(args.config), flag_overrides(args, {"x": "x"}))
    cfg = validate(DensityRunConfig, dist_override(data, args))
    value = math.exp(log_density(cfg.dist, cfg.x))
    emit(f"{value!r}\n", cfg.out)
    return EXIT_OK


def cmd_map_eval(args: argparse.Namespace) -> int:
    data = merge(read_config_file(args.config), flag_overrides(args, {"x": "point.x", "y": "point.y"}))
    cfg = validate(MapEvalRunConfig, map_override(data, args))
    image = apply_map(cfg.map, cfg.point)
    emit(f"{image.x!r} {image.y!r}\n", cfg.out)
    return EXIT_OK
