"""
Logging configuration for the spectral toolkit.

- Console output on stderr so stdout stays machine-readable (JSON/CSV)
- Optional rotating file logs (app.log, error.log)
- JSON formatting for log aggregation, with numeric context fields
"""

import functools
import json
import logging
import logging.handlers
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict

ROOT_LOGGER = "dslp"

# Extra attributes copied into JSON records when present.
_CONTEXT_FIELDS = ("duration_ms", "function", "param", "n_points", "code", "degree", "sweep")


class JSONFormatter(logging.Formatter):
    """Formatter that emits one JSON object per record."""

    def format(self, record: logging.LogRecord) -> str:
        log_data: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
            "message": record.getMessage(),
        }
        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)
        for name in _CONTEXT_FIELDS:
            if hasattr(record, name):
                log_data[name] = getattr(record, name)
        return json.dumps(log_data, default=str)


def setup_logging(
    log_level: str = "INFO",
    log_dir: str = "logs",
    enable_console: bool = True,
    enable_file: bool = False,
    json_format: bool = False,
) -> logging.Logger:
    """
    Configure the package logger tree.

    Args:
        log_level: Minimum level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_dir: Directory for log files (created when file logging is on)
        enable_console: Log to stderr
        enable_file: Log to rotating files in ``log_dir``
        json_format: Use :class:`JSONFormatter` for every handler

    Returns:
        The configured ``dslp`` logger
    """
    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(getattr(logging, log_level.upper(), logging.INFO))
    logger.handlers.clear()
    logger.propagate = False

    text_format = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    formatter: logging.Formatter = JSONFormatter() if json_format else text_format

    if enable_console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logger.level)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    if enable_file:
        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)

        file_handler = logging.handlers.RotatingFileHandler(
            filename=log_path / "app.log",
            maxBytes=10 * 1024 * 1024,
            backupCount=5,
            encoding="utf-8",
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

        error_handler = logging.handlers.RotatingFileHandler(
            filename=log_path / "error.log",
            maxBytes=10 * 1024 * 1024,
            backupCount=5,
            encoding="utf-8",
        )
        error_handler.setLevel(logging.ERROR)
        error_handler.setFormatter(formatter)
        logger.addHandler(error_handler)

    logger.debug(
        f"Logging configured: level={log_level}, console={enable_console}, "
        f"file={enable_file}, json={json_format}"
    )
    return logger


def get_logger(name: str) -> logging.Logger:
    """Logger below the package root, e.g. ``get_logger(__name__)``."""
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def log_performance(logger: logging.Logger):
    """Decorator that logs the wall time of each call at DEBUG level."""

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as exc:
                duration_ms = (time.perf_counter() - start_time) * 1000
                logger.debug(
                    f"{func.__name__} failed: {exc}",
                    extra={"duration_ms": duration_ms, "function": func.__name__},
                )
                raise
            duration_ms = (time.perf_counter() - start_time) * 1000
            logger.debug(
                f"{func.__name__} completed",
                extra={"duration_ms": duration_ms, "function": func.__name__},
            )
            return result

        return wrapper

    return decorator


class LogContext:
    """
    Context manager logging the start, end and duration of an operation.

    Example:
        >>> with LogContext(logger, "Tracing branch", param=0.5):
        ...     branch = branch_trace(family, 1.0)
    """

    def __init__(self, logger: logging.Logger, operation: str, **kwargs):
        self.logger = logger
        self.operation = operation
        self.context = kwargs
        self.start_time = 0.0

    def __enter__(self):
        self.start_time = time.perf_counter()
        self.logger.info(f"Starting: {self.operation}", extra=self.context)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        duration_ms = (time.perf_counter() - self.start_time) * 1000
        if exc_type is None:
            self.logger.info(
                f"Completed: {self.operation}",
                extra={**self.context, "duration_ms": duration_ms},
            )
        else:
            self.logger.error(
                f"Failed: {self.operation} - {exc_val}",
                extra={**self.context, "duration_ms": duration_ms},
            )
        return False
