"""Logging setup, contextual run logger, and rotating file handler."""

from __future__ import annotations

import logging
import logging.config
import time
from collections.abc import Iterator, MutableMapping
from contextlib import contextmanager
from pathlib import Path
from typing import Any

# ---------------------------------------------------------------------------
# Format
# ---------------------------------------------------------------------------
_LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
_LOG_FILE = "hetgt.log"

# Third-party loggers that are chatty at DEBUG.
_QUIET_LOGGERS = ("matplotlib", "numba", "urllib3")


# ---------------------------------------------------------------------------
# setup_logging
# ---------------------------------------------------------------------------
def setup_logging(
    log_level: str = "INFO",
    log_dir: str | Path | None = "logs",
    max_bytes: int = 5 * 1024 * 1024,  # 5 MB
    backup_count: int = 3,
) -> Path | None:
    """Install console (stderr) and rotating-file handlers on the root logger.

    Idempotent: replaces handlers installed by an earlier call.  Python
    ``warnings`` (numpy overflow and the like) are routed into logging.

    Args:
        log_level: One of DEBUG / INFO / WARNING / ERROR / CRITICAL.
        log_dir: Directory for ``hetgt.log`` (created if absent); ``None``
            keeps console output only.
        max_bytes: Max size per log file before rotation.
        backup_count: Number of rotated backup files to keep.

    Returns:
        The log file path, or ``None`` without a file handler.
    """
    level = logging.getLevelName(log_level.upper())
    if not isinstance(level, int):
        level = logging.INFO

    handlers: dict[str, dict[str, Any]] = {
        "console": {"class": "logging.StreamHandler", "formatter": "plain", "level": level},
    }
    log_file: Path | None = None
    if log_dir is not None:
        log_file = Path(log_dir) / _LOG_FILE
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers["file"] = {
            "class": "logging.handlers.RotatingFileHandler",
            "formatter": "plain",
            "level": level,
            "filename": str(log_file),
            "maxBytes": max_bytes,
            "backupCount": backup_count,
            "encoding": "utf-8",
        }

    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {"plain": {"format": _LOG_FORMAT, "datefmt": _DATE_FORMAT}},
            "handlers": handlers,
            "root": {"level": level, "handlers": list(handlers)},
            "loggers": {name: {"level": "WARNING"} for name in _QUIET_LOGGERS},
        }
    )
    logging.captureWarnings(True)
    return log_file


# ---------------------------------------------------------------------------
# get_logger
# ---------------------------------------------------------------------------
def get_logger(name: str) -> logging.Logger:
    """Return a stdlib Logger for *name* (typically ``__name__``)."""
    return logging.getLogger(name)


# ---------------------------------------------------------------------------
# ContextualLogger
# ---------------------------------------------------------------------------
class ContextualLogger(logging.LoggerAdapter):
    """Adapter that prefixes ``[key=value]`` context to every message.

    Usage::

        log = ContextualLogger(get_logger(__name__), model="HetGTAN", seed=3)
        log.info("Early stop at epoch %d", 42)  # => "[model=HetGTAN] [seed=3] Early stop at epoch 42"
    """

    def __init__(self, logger: logging.Logger, **context: Any) -> None:
        super().__init__(logger, dict(context))

    @property
    def context(self) -> dict[str, Any]:
        return dict(self.extra or {})

    def bind(self, **context: Any) -> ContextualLogger:
        """A child logger carrying this logger's context plus *context*."""
        return ContextualLogger(self.logger, **{**self.context, **context})

    def process(self, msg: Any, kwargs: MutableMapping[str, Any]) -> tuple[Any, MutableMapping[str, Any]]:
        prefix = " ".join(f"[{k}={v}]" for k, v in self.context.items())
        return (f"{prefix} {msg}" if prefix else msg), kwargs


@contextmanager
def log_duration(log: logging.Logger | ContextualLogger, what: str, level: int = logging.INFO) -> Iterator[None]:
    """Log how long the enclosed block took."""
    start = time.perf_counter()
    try:
        yield
    finally:
        log.log(level, "%s took %.2f s", what, time.perf_counter() - start)
