import argparse
import logging

from pydantic import ValidationError

from ipverify.cli.deps import resolve
from ipverify.cli.output import append_summary, write_report
from ipverify.core.errors import EXIT_FAILED, EXIT_OK, ConfigError
from ipverify.numerics.statcheck import build_scenario, run_ip_experiment, summary_row
from ipverify.schemas.experiment import IpExperimentConfig, VerificationReport
from ipverify.schemas.run_config import IpRunConfig

logger = logging.getLogger(__name__)

FLAGS = {
    "scenario": "scenario",
    "lam": "lam",
    "a": "a",
    "b": "b",
    "c": "c",
    "alpha": "alpha",
    "beta": "beta",
    "delta": "delta",
    "n": "n",
    "n_permutations": "n_permutations",
    "dcorr_subsample": "dcorr_subsample",
    "retries": "retries",
}
SCENARIOS = ["fab", "fainf", "fazero", "gdelta", "gdelta_unit", "negative_control"]


def register(sub: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]) -> None:
    p = sub.add_parser("verify-ip", parents=parents, help="Sample a product law, map it and test the image")
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--n", type=int, help="Sample size")
    p.add_argument("--permutations", dest="n_permutations", type=int)
    p.add_argument("--subsample", dest="dcorr_subsample", type=int, help="Pairs used by the distance correlation")
    p.add_argument("--retries", type=int)
    p.set_defaults(handler=cmd_verify_ip)


def experiment_for(cfg: IpRunConfig) -> IpExperimentConfig:
    if cfg.experiment is not None:
        return cfg.experiment
    try:
        return build_scenario(cfg)
    except ValidationError as exc:
        raise ConfigError(f"scenario {cfg.scenario} rejects these parameters: {exc.errors()[0]['msg']}")


def run_ip_command(cfg: IpRunConfig) -> VerificationReport:
    experiment = experiment_for(cfg)
    logger.info("running %s with n=%d, seed=%d", experiment.name, experiment.n, experiment.seed)
    return run_ip_experiment(experiment, workers=cfg.threads)


def cmd_verify_ip(args: argparse.Namespace) -> int:
    cfg = resolve(IpRunConfig, args, FLAGS)
    report = run_ip_command(cfg)
    row = summary_row(report)
    write_report(report, [row], cfg)
    if cfg.summary is not None:
        append_summary(cfg.summary, row)
    return EXIT_OK if report.passed else EXIT_FAILED
