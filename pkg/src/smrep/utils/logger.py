"""
smrep/utils/logger.py
─────────────────────
One place to build loggers.  Every long-running component does

    self.logger = setup_logger(f"{__name__}.ClassName")

and gets a rich-formatted handler at the configured level.
"""
from __future__ import annotations

import logging
from typing import Optional

from rich.logging import RichHandler

from smrep.config import settings

_configured: set[str] = set()


def setup_logger(name: str, level: Optional[str] = None) -> logging.Logger:
    """Return a logger with a single RichHandler attached."""
    logger = logging.getLogger(name)
    if name not in _configured:
        handler = RichHandler(show_path=False, rich_tracebacks=True, markup=False)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(handler)
        logger.propagate = False
        _configured.add(name)
    logger.setLevel((level or settings.log_level).upper())
    return logger


def set_level(level: str) -> None:
    """Change the level of every logger built so far and of those built later."""
    settings.log_level = level
    for name in _configured:
        logging.getLogger(name).setLevel(level.upper())
