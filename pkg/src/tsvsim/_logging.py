"""Logger helpers for the simulator.

'why': each runner owns one logger, and each experiment run gets a child of it
whose records can also be kept in a file of their own
"""
from __future__ import annotations

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Final

from ._models import LogLevel


_FORMAT: Final[str] = "%(asctime)s %(levelname)s tsvsim: %(message)s"
_EXPERIMENT_FORMAT: Final[str] = "%(asctime)s %(levelname)s %(experiment)s seed=%(seed)s: %(message)s"
LOGGER_NAMESPACE: Final[str] = "tsvsim"
"""Parent logger namespace for external configuration.

Users can configure logging externally via::

    logging.getLogger("tsvsim").setLevel(logging.WARNING)
"""

_LEVELS: Final[dict[LogLevel, int]] = {
    LogLevel.CRITICAL: logging.CRITICAL,
    LogLevel.ERROR: logging.ERROR,
    LogLevel.WARNING: logging.WARNING,
    LogLevel.INFO: logging.INFO,
    LogLevel.DEBUG: logging.DEBUG,
}


def configure_logger(
    name: str,
    level: LogLevel,
    log_directory: Path | None,
) -> logging.Logger:
    """Configure and return the logger owned by one experiment runner.

    When the 'tsvsim' parent logger already has handlers, records propagate to
    them; otherwise the runner logger gets its own stream handler.
    """

    logger = logging.getLogger(name)
    _close_and_clear_handlers(logger)

    formatter = logging.Formatter(fmt=_FORMAT)
    logger.propagate = bool(logging.getLogger(LOGGER_NAMESPACE).handlers)
    if not logger.propagate:
        _ = _attach(logger, logging.StreamHandler(), formatter)
    if log_directory is not None:
        _ = _attach(logger, _file_handler(log_directory, f"{name.replace('.', '_')}.log"), formatter)

    logger.setLevel(_LEVELS[level])
    return logger


@contextmanager
def experiment_logger(runner_logger: logging.Logger, experiment_id: str, seed: int, log_directory: Path | None) -> Iterator[logging.Logger]:
    """Yield a child of `runner_logger` that tags its records with the experiment and seed.

    Records still reach the runner's handlers. With a log directory, the run
    also writes `<experiment_id>-seed<seed>.log`, closed when the block exits.
    """

    logger = runner_logger.getChild(experiment_id.replace(".", "_"))
    tags = _ExperimentTags(experiment_id, seed)
    logger.addFilter(tags)
    handler = None
    if log_directory is not None:
        handler = _attach(logger, _file_handler(log_directory, f"{experiment_id}-seed{seed}.log"), logging.Formatter(_EXPERIMENT_FORMAT))
    try:
        yield logger
    finally:
        logger.removeFilter(tags)
        if handler is not None:
            handler.close()
            logger.removeHandler(handler)


class _ExperimentTags(logging.Filter):
    def __init__(self, experiment_id: str, seed: int) -> None:
        super().__init__()
        self._experiment_id: str = experiment_id
        self._seed: int = seed

    def filter(self, record: logging.LogRecord) -> bool:
        record.experiment = self._experiment_id
        record.seed = self._seed
        return True


def _file_handler(log_directory: Path, file_name: str) -> logging.FileHandler:
    log_directory.mkdir(parents=True, exist_ok=True)
    return logging.FileHandler(log_directory / file_name, encoding="utf-8")


def _attach(logger: logging.Logger, handler: logging.Handler, formatter: logging.Formatter) -> logging.Handler:
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    return handler


def _close_and_clear_handlers(logger: logging.Logger) -> None:
    """Close all handlers before removing them."""

    for handler in logger.handlers[:]:
        handler.close()
        logger.removeHandler(handler)
