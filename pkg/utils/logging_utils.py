"""
Logging set-up shared by every module of the suite: a time-rotated log file plus
the console, with each record stamped with the scenario being simulated.

Usage:
    Module level::

        logger: logging.Logger = setup_module_logger(__name__)

    Entry point, once::

        setup_root_logging()

    Around one closed-loop run::

        with scenario_logging_context(scenario.name):
            ...

Dependencies:
- contextvars
- logging.handlers.TimedRotatingFileHandler
"""

__all__ = [
    "setup_root_logging",
    "setup_module_logger",
    "scenario_logging_context",
    "current_scenario",
]

import contextlib
import contextvars
import logging
from logging.handlers import TimedRotatingFileHandler
import os
from typing import Iterator, Optional

MY_MODULES_PREFIX_LIST: list[str] = ["src", "utils", "tasks"]

DEFAULT_LOG_FILE: str = "/tmp/lim_drive.log"

LOG_FORMAT: str = (
    '%(asctime)s.%(msecs)03d %(levelname)-8s | scenario:%(scenario)s PID:%(process)d '
    'TID:%(thread)d | %(name)s %(funcName)s %(filename)s:%(lineno)3s | %(message)s'
)

_NO_SCENARIO: str = "-"

_scenario_var: contextvars.ContextVar[str] = contextvars.ContextVar(
    "scenario", default=_NO_SCENARIO
)


def _list_my_loggers() -> list[str]:
    """
    :return: names of the existing loggers under one of MY_MODULES_PREFIX_LIST.
    :rtype: list[str]
    """
    prefixes: tuple[str, ...] = tuple(MY_MODULES_PREFIX_LIST)
    return [
        name
        for name, candidate in logging.Logger.manager.loggerDict.items()
        if isinstance(candidate, logging.Logger) and name.startswith(prefixes)
    ]


def current_scenario() -> str:
    """
    :return: name of the scenario bound to the current context, '-' when none.
    :rtype: str
    """
    return _scenario_var.get()


@contextlib.contextmanager
def scenario_logging_context(scenario_name: str) -> Iterator[None]:
    """
    Bind a scenario name to every log record emitted inside the ``with`` block.

    Backed by a ContextVar, so threads running different scenarios in parallel
    each see their own name.

    :param str scenario_name: name to expose as ``%(scenario)s`` in log records.
    """
    token: contextvars.Token = _scenario_var.set(scenario_name)
    try:
        yield
    finally:
        _scenario_var.reset(token)


class _ContextFilter(logging.Filter):
    """
    Stamps records with the scenario bound by scenario_logging_context().
    See https://docs.python.org/3/howto/logging-cookbook.html#filters-contextual
    """

    def filter(self, record: logging.LogRecord) -> bool:
        """
        :param logging.LogRecord record: record to stamp.
        :return: always True, no record is dropped.
        :rtype: bool
        """
        record.scenario = current_scenario()
        return True


def _default_log_level() -> int:
    # LOG_LEVEL by name, INFO when unset or unknown
    level_name: str = os.getenv('LOG_LEVEL', 'INFO').upper()
    return getattr(logging, level_name, logging.INFO)


def _build_handlers(
    log_file: str, when: str, backup_count: int, level: int
) -> list[logging.Handler]:
    log_dir: str = os.path.dirname(log_file)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)

    formatter: logging.Formatter = logging.Formatter(LOG_FORMAT, datefmt='%Y-%m-%d %H:%M:%S')
    ctx_filter: _ContextFilter = _ContextFilter()
    file_handler: logging.Handler = TimedRotatingFileHandler(
        log_file, when=when, backupCount=backup_count
    )
    console_handler: logging.Handler = logging.StreamHandler()
    console_handler.setLevel(level)

    handlers: list[logging.Handler] = [file_handler, console_handler]
    for handler in handlers:
        handler.setFormatter(formatter)
        handler.addFilter(ctx_filter)
    return handlers


def setup_root_logging(
    log_file: Optional[str] = None, when: str = 'midnight', backup_count: int = 5
) -> None:
    """
    Configure the root logger with a time-rotated file and the console (stderr).

    Project loggers that already exist (module loggers are created at import time)
    are given the same handlers and stop propagating, so that each record is
    written once.

    :param log_file: log file, env variable LOG_FILE or /tmp/lim_drive.log by default.
        Its directory is created when missing.
    :param when: rotation interval of TimedRotatingFileHandler (default: 'midnight').
    :param backup_count: rotated files kept (default: 5).
    """
    level: int = _default_log_level()
    handlers: list[logging.Handler] = _build_handlers(
        log_file or os.getenv('LOG_FILE', DEFAULT_LOG_FILE), when, backup_count, level
    )

    root: logging.Logger = logging.getLogger()
    root.handlers.clear()
    root.setLevel(level)
    for handler in handlers:
        root.addHandler(handler)

    for name in _list_my_loggers():
        project_logger: logging.Logger = logging.getLogger(name)
        project_logger.handlers.clear()
        for handler in handlers:
            project_logger.addHandler(handler)
        project_logger.propagate = False


def setup_module_logger(module_name: str, log_level: Optional[int] = None) -> logging.Logger:
    """
    :param module_name: usually ``__name__``.
    :param log_level: level of this logger, env variable LOG_LEVEL (INFO when unset) by
        default.
    :return: the module logger.
    """
    logger: logging.Logger = logging.getLogger(module_name)
    logger.setLevel(log_level if log_level else _default_log_level())
    return logger
