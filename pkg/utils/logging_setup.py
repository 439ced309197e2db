from __future__ import annotations

import logging
from typing import Optional

from config import Config


def configure_logging(level: Optional[str] = None) -> None:
    """basicConfig from Config; the CLI's --log-level wins over ZETA_LOG_LEVEL."""
    name = (level or Config.LOG_LEVEL or "INFO").upper()
    numeric = getattr(logging, name, None)
    if not isinstance(numeric, int):
        numeric = logging.INFO
    logging.basicConfig(level=numeric, format=Config.LOG_FORMAT, force=True)
    for quiet in Config.QUIET_LOGGERS:
        logging.getLogger(quiet).setLevel(max(numeric, logging.WARNING))
