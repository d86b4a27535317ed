"""
Centralized logging configuration for the toolkit.

Every module logs through `logging.getLogger(__name__)`; configuring the
package logger `src` once (as the CLI does) gives all of them the same
handlers. Records use `%(asctime)s - %(name)s - %(levelname)s - %(message)s`
and go to stderr, so CSV written to stdout stays byte-clean. A rotating file
handler is added when a log file is named.

LOG_LEVEL and LOG_FILE only change diagnostics, never computed values.
"""

import logging
import logging.handlers
import os
import sys
from pathlib import Path
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
DEFAULT_MAX_BYTES = 10 * 1024 * 1024
DEFAULT_BACKUP_COUNT = 5


def _resolve_level(log_level: str) -> int:
    return getattr(logging, str(log_level).strip().upper(), logging.INFO)


def _build_handler(handler: logging.Handler, level: int) -> logging.Handler:
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    return handler


def setup_logging(
    logger_name: str,
    log_level: str = "INFO",
    log_file: Optional[str] = None,
    max_bytes: int = DEFAULT_MAX_BYTES,
    backup_count: int = DEFAULT_BACKUP_COUNT
) -> logging.Logger:
    """
    Attach the toolkit's handlers to a logger.

    Calling it again replaces the handlers instead of stacking them.

    Args:
        logger_name: Logger to configure, usually `src` or a script's __name__
        log_level: DEBUG, INFO, WARNING, ERROR or CRITICAL; unknown names mean INFO
        log_file: Optional path of a rotating log file; parent directories are created
        max_bytes: Size at which the log file rotates
        backup_count: Rotated files kept

    Returns:
        The configured logger
    """
    logger = logging.getLogger(logger_name)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    level = _resolve_level(log_level)
    logger.setLevel(level)
    logger.addHandler(_build_handler(logging.StreamHandler(sys.stderr), level))

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        rotating = logging.handlers.RotatingFileHandler(
            log_path, maxBytes=max_bytes, backupCount=backup_count, encoding='utf-8'
        )
        logger.addHandler(_build_handler(rotating, level))

    logger.propagate = False
    return logger


def setup_logging_from_env(logger_name: str, log_level: Optional[str] = None) -> logging.Logger:
    """
    Configure a logger from LOG_LEVEL and LOG_FILE.

    An explicit `log_level` (for example a --log-level flag) wins over the
    environment. Call load_dotenv() first if a .env file should be honoured.
    """
    level = log_level or os.getenv('LOG_LEVEL', 'INFO')
    return setup_logging(logger_name, log_level=level, log_file=os.getenv('LOG_FILE') or None)


def get_logger(logger_name: str) -> logging.Logger:
    """Return a logger, configuring it with defaults on first use."""
    logger = logging.getLogger(logger_name)
    if not logger.handlers:
        return setup_logging(logger_name)
    return logger
