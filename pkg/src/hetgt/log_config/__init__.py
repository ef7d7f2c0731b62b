"""Logging setup and contextual run logger."""

from hetgt.log_config.logger import ContextualLogger, get_logger, log_duration, setup_logging

__all__ = ["ContextualLogger", "get_logger", "log_duration", "setup_logging"]
