"""
Logging configuration for qpcocycle.

Console output goes to stderr so that data written to stdout by the CLI
stays machine-readable. A rotating file handler is added when LOG_FILE
is configured.
"""

import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

from qpcocycle.config import settings


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """
    Configure application logging.

    Sets up a console handler and, when ``settings.LOG_FILE`` is set, a
    rotating file handler, with formatting based on ``settings.DEBUG``.

    Args:
        level: Override for ``settings.LOG_LEVEL`` (e.g. from ``--log-level``)

    Returns:
        The configured root logger
    """
    log_level = (level or settings.LOG_LEVEL).upper()

    logger = logging.getLogger()
    logger.setLevel(log_level)

    # Remove existing handlers to avoid duplicates
    logger.handlers.clear()

    if settings.DEBUG:
        # Detailed format for development
        log_format = logging.Formatter(
            fmt="%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
    else:
        log_format = logging.Formatter(
            fmt="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.DEBUG if settings.DEBUG else log_level)
    console_handler.setFormatter(log_format)
    logger.addHandler(console_handler)

    if settings.LOG_FILE:
        log_path = Path(settings.LOG_FILE)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_path,
            maxBytes=10 * 1024 * 1024,  # 10 MB
            backupCount=5,
            encoding="utf-8",
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(log_format)
        logger.addHandler(file_handler)

    # Reduce noise from some verbose libraries
    logging.getLogger("uvicorn.access").setLevel(logging.WARNING)
    logging.getLogger("joblib").setLevel(logging.WARNING)

    logger.debug("=" * 60)
    logger.debug(f"{settings.APP_NAME} {settings.VERSION} - Logging initialized")
    logger.debug(f"Log Level: {log_level}")
    logger.debug(f"Debug Mode: {settings.DEBUG}")
    logger.debug("=" * 60)

    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance for a specific module.

    Args:
        name: Logger name (typically __name__ of the module)

    Returns:
        Configured logger instance
    """
    return logging.getLogger(name)
