"""
Logging Configuration and Utilities
Centralized logging setup for Symatch
"""

import copy
import functools
import logging
import logging.config
import sys
import time
from pathlib import Path
from typing import Optional

import colorlog

from ..config.settings import LOGGING_CONFIG, LOG_FILE

CONSOLE_COLORS = {
    'DEBUG': 'cyan',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'purple',
}


def setup_logging(
    log_level: str = 'INFO',
    console_output: bool = True,
    log_file: Optional[str] = None,
) -> logging.Logger:
    """
    Set up logging configuration for Symatch.

    Args:
        log_level: Logging level ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')
        console_output: Whether to output logs to console
        log_file: Override for the detailed log file

    Returns:
        Configured logger instance
    """
    config = copy.deepcopy(LOGGING_CONFIG)
    path = LOG_FILE if log_file is None else log_file
    Path(path).parent.mkdir(parents=True, exist_ok=True)

    config['handlers']['file']['filename'] = str(path)
    config['handlers']['file']['level'] = log_level

    if console_output:
        config['handlers']['console']['level'] = log_level
        config['formatters']['colored'] = {
            '()': colorlog.ColoredFormatter,
            'format': '%(log_color)s%(levelname)s%(reset)s: %(message)s',
            'log_colors': CONSOLE_COLORS,
        }
        config['handlers']['console']['formatter'] = 'colored'
    else:
        config['handlers'].pop('console', None)
        config['loggers']['symatch']['handlers'] = ['file']

    logging.config.dictConfig(config)

    logger = logging.getLogger('symatch')
    logger.debug(f"Logging initialized - Level: {log_level}, Console: {console_output}")
    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance for a specific module.

    Args:
        name: Name of the logger (usually __name__)

    Returns:
        Logger instance
    """
    if not name.startswith('symatch'):
        name = f'symatch.{name}'
    return logging.getLogger(name)


def log_performance(func):
    """Decorator to log function execution time."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        logger = get_logger(func.__module__)

        start_time = time.perf_counter()
        try:
            result = func(*args, **kwargs)
            logger.info(f"{func.__name__} completed in {time.perf_counter() - start_time:.2f}s")
            return result
        except Exception as e:
            logger.error(f"{func.__name__} failed after {time.perf_counter() - start_time:.2f}s: {e}")
            raise

    return wrapper


def setup_exception_logging():
    """Set up global exception logging."""
    def handle_exception(exc_type, exc_value, exc_traceback):
        if issubclass(exc_type, KeyboardInterrupt):
            sys.__excepthook__(exc_type, exc_value, exc_traceback)
            return

        logger = get_logger('symatch.exceptions')
        logger.critical(
            "Uncaught exception",
            exc_info=(exc_type, exc_value, exc_traceback)
        )

    sys.excepthook = handle_exception


class ProgressLogger:
    """
    Logger for tracking progress of long-running operations.

    Only every `every`-th step is reported so per-pattern loops stay quiet.
    """

    def __init__(self, operation_name: str, total_steps: int, every: int = 1):
        self.operation_name = operation_name
        self.total_steps = total_steps
        self.current_step = 0
        self.every = max(1, every)
        self.logger = get_logger('symatch.progress')

        self.logger.info(f"Starting {operation_name} ({total_steps} steps)")

    def step(self, message: str = "", count: int = 1):
        """Advance by count steps."""
        before = self.current_step // self.every
        self.current_step += count
        if self.current_step // self.every == before and self.current_step != self.total_steps:
            return

        percentage = (self.current_step / self.total_steps) * 100 if self.total_steps else 100.0
        progress_msg = f"{self.operation_name}: Step {self.current_step}/{self.total_steps} ({percentage:.1f}%)"
        if message:
            progress_msg += f" - {message}"
        self.logger.info(progress_msg)

    def complete(self, message: str = ""):
        """Mark the operation as complete."""
        complete_msg = f"{self.operation_name} completed"
        if message:
            complete_msg += f" - {message}"
        self.logger.info(complete_msg)

    def error(self, message: str):
        """Log an error during the operation."""
        self.logger.error(f"{self.operation_name} failed at step {self.current_step}: {message}")


def create_progress_logger(name: str, total_steps: int, every: int = 1) -> ProgressLogger:
    return ProgressLogger(name, total_steps, every)
