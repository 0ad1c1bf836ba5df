import csv
import hashlib
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from pydantic import BaseModel

from ipverify.schemas.report import SuiteReport
from ipverify.schemas.run_config import RunConfigBase

logger = logging.getLogger(__name__)


def render(report: BaseModel, rows: Sequence[dict[str, Any]], fmt: str) -> str:
    if fmt == "json":
        return report.model_dump_json(indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    logger.info("report written to %s", out)


def write_report(report: BaseModel, rows: Sequence[dict[str, Any]], cfg: RunConfigBase) -> None:
    emit(render(report, rows, cfg.format), cfg.out)


def append_summary(path: Path, row: dict[str, Any]) -> None:
    """Append one row, writing the header when the file is new or empty."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not path.exists() or path.stat().st_size == 0
    with open(path, "a", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(row), lineterminator="\n")
        if fresh:
            writer.writeheader()
        writer.writerow(row)


def suite_summary_row(report: SuiteReport) -> dict[str, Any]:
    """Summary row for a residual suite; statistical columns stay empty."""
    digest = hashlib.sha256(json.dumps(report.config, sort_keys=True).encode()).hexdigest()[:12]
    return {
        "config_hash": digest,
        "map": report.command,
        "params": "",
        "n": sum(len(s.records) for s in report.sections),
        "seed": report.config.get("seed", ""),
        "dcorr": "",
        "p": "",
        "ks_u": "",
        "ks_v": "",
        "pass": int(report.passed),
    }
