"""
Logging utilities for specdisp.
"""
import logging
import os
import sys
from datetime import datetime
from typing import Any, Dict, Optional

APP_LOGGER = "specdisp"


def setup_logger(name: str = APP_LOGGER, level: str = None) -> logging.Logger:
    """Set up structured logging for the application."""

    # Get log level from environment or default to INFO
    if level is None:
        level = os.environ.get("LOG_LEVEL", "INFO").upper()
    level = level.upper()
    if not isinstance(getattr(logging, level, None), int):
        level = "INFO"

    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level))

    # Avoid duplicate handlers
    if logger.handlers:
        for handler in logger.handlers:
            handler.setLevel(getattr(logging, level))
        return logger

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # stdout is reserved for command output
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, level))
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    log_file = os.environ.get("LOG_FILE")
    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(getattr(logging, level))
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def get_logger(component: str) -> logging.Logger:
    """Child logger of the application logger for one component."""
    return logging.getLogger(f"{APP_LOGGER}.{component}")


def log_execution_metrics(logger: logging.Logger, metrics: Dict[str, Any]) -> None:
    """Log execution metrics in a structured format."""
    summary = ", ".join(f"{key}={value}" for key, value in metrics.items())
    logger.info(f"Execution metrics: {summary}", extra={"metrics": metrics})


def log_error_with_context(logger: logging.Logger, error: Exception,
                           context: Optional[Dict[str, Any]] = None) -> None:
    """Log error with additional context information."""
    error_info = {
        "error_type": type(error).__name__,
        "error_message": str(error),
        "timestamp": datetime.now().isoformat()
    }

    if context:
        error_info.update(context)

    logger.error(f"{error_info['error_type']}: {error_info['error_message']}",
                 extra={"error_info": error_info})
