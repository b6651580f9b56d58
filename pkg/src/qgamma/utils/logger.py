"""
Centralized logging configuration for qgamma.

One stdout logger named "qgamma" is shared by every pipeline stage. The
initial level comes from QGAMMA_LOG_LEVEL; the CLI changes it per run with
--log-level. Numerical warnings use the "⚠️ WARN:" prefix, completed stages
log a "✅ ... completed" line.
"""

import logging
import os
import sys
from typing import IO, Optional

LOG_FORMAT: str = "%(levelname)s - %(message)s"


def _parse_level(level: str) -> int:
    value = logging.getLevelName(str(level).upper())
    if not isinstance(value, int):
        raise ValueError(f"Invalid logging level: {level}")
    return value


def setup_logger(
    name: str = "qgamma", level: str = "INFO", stream: Optional[IO[str]] = None
) -> logging.Logger:
    """
    Return the named logger, attaching a stream handler on first use.

    Args:
        name: Logger name
        level: Level name such as "INFO" or "debug"
        stream: Target stream (default: sys.stdout)

    Raises:
        ValueError: If level is not a logging level name
    """
    numeric = _parse_level(level)
    log = logging.getLogger(name)
    if log.handlers:
        return log

    log.setLevel(numeric)
    handler = logging.StreamHandler(stream or sys.stdout)
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    log.addHandler(handler)
    log.propagate = False
    return log


def set_level(level: str) -> None:
    """Change the level of the package logger (the --log-level flag)."""
    logger.setLevel(_parse_level(level))


# read from the environment so importing the logger never loads the settings module
logger: logging.Logger = setup_logger(level=os.getenv("QGAMMA_LOG_LEVEL", "INFO"))


__all__ = ["LOG_FORMAT", "logger", "set_level", "setup_logger"]
