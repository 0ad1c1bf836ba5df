import logging
import sys

from ipverify.core.config import settings

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | None = None) -> None:
    """Route package logs to stderr; stdout carries reports only."""
    name = (level or settings.LOG_LEVEL).upper()
    if settings.DEBUG and level is None:
        name = "DEBUG"
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        numeric = logging.WARNING

    root = logging.getLogger("ipverify")
    root.setLevel(numeric)
    if not any(getattr(h, "_ipverify", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._ipverify = True  # type: ignore[attr-defined]
        root.addHandler(handler)
    root.propagate = False
