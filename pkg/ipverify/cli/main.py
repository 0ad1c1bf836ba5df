"""Command-line entry point; each sub-command module registers its own parser."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from ipverify import __version__
from ipverify.cli.commands import hde, ip, maps, transforms, utility
from ipverify.core.config import settings
from ipverify.core.errors import IpVerifyError
from ipverify.core.logging import configure_logging

logger = logging.getLogger(__name__)

COMMANDS = (transforms, maps, ip, hde, utility)


def common_parser() -> argparse.ArgumentParser:
    """Flags every sub-command accepts; unset flags leave the config file value alone."""
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--out", type=Path, help="Report path; stdout when omitted")
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="Worker threads")
    p.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    p.add_argument("--summary", type=Path, help="CSV file to append a one-line summary to")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=settings.APP_NAME, description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    parents = [common_parser()]
    for module in COMMANDS:
        module.register(sub, parents)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(args.log_level)
    logger.debug("running %s", args.command)
    try:
        return int(args.handler(args))
    except IpVerifyError as exc:
        print(f"{settings.APP_NAME}: error: {exc.detail}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
