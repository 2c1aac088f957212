"""
This module provides utilities for formatting flat metric dictionaries into
plain text, either as ``key=value`` lines or as a CSV header plus one row.

Classes:
    MetricsFormatter -- Formats a flat mapping of metric names to values.

Functions:
    - format_table: Formats several mappings, one block or row each.

Usage:
    Example:
        formatter = MetricsFormatter({"transitions_per_second": 1542.0, "rmse": 0.001})
        text = formatter.format()  # "transitions_per_second=1542.0\\nrmse=0.001"
"""

__all__ = ['MetricsFormatter', 'FORMATS', 'format_table']

import logging
from typing import Mapping, Sequence

from .logging_utils import setup_module_logger

logger: logging.Logger = setup_module_logger(__name__)

FORMATS: tuple[str, ...] = ("kv", "csv")


def _render(value: object) -> str:
    # repr keeps floats lossless (shortest round-trip form)
    if isinstance(value, float):
        return repr(value)
    return str(value)


class MetricsFormatter:
    """
    A class used to format flat metric mappings into text.

    Insertion order of the mapping is the output order.

    Example usage:
        formatter = MetricsFormatter({"a": 1, "b": 2.5})
        formatter.format("kv")   # Returns "a=1\\nb=2.5"
        formatter.format("csv")  # Returns "a,b\\n1,2.5"
    """

    def __init__(self, metrics: Mapping[str, object]) -> None:
        """
        :param metrics: flat mapping of metric names to scalar values.
        :type metrics: Mapping[str, object]
        """
        if not isinstance(metrics, Mapping):
            raise ValueError("metrics must be a mapping")
        self._metrics: dict[str, object] = dict(metrics)
        self._formatted: str | None = None

    @property
    def formatted(self) -> str | None:
        """
        Property exposing the text produced by the last call to format().
        """
        return self._formatted

    def format(self, fmt: str = "kv") -> str:
        """
        Formats the metrics.

        :param str fmt: 'kv' for one ``key=value`` per line, 'csv' for a header row
            followed by a value row.
        :return: the formatted text, without trailing newline.
        :rtype: str
        """
        if fmt == "kv":
            self._formatted = "\n".join(f"{k}={_render(v)}" for k, v in self._metrics.items())
        elif fmt == "csv":
            header: str = ",".join(self._metrics.keys())
            row: str = ",".join(_render(v) for v in self._metrics.values())
            self._formatted = f"{header}\n{row}"
        else:
            raise ValueError(f"unknown metrics format '{fmt}', expected one of {FORMATS}")
        logger.debug(self._formatted)
        return self._formatted


def format_table(rows: Sequence[Mapping[str, object]], fmt: str = "kv") -> str:
    """
    Formats several metric mappings sharing the same keys.

    :param Sequence rows: one mapping per run, same keys in the same order.
    :param str fmt: 'kv' for blank-line separated ``key=value`` blocks, 'csv' for one
        header row followed by one row per mapping.
    :return: the formatted text, without trailing newline.
    :rtype: str
    """
    if fmt == "kv":
        return "\n\n".join(MetricsFormatter(row).format("kv") for row in rows)
    if fmt == "csv":
        if not rows:
            return ""
        lines: list[str] = [",".join(rows[0].keys())]
        lines.extend(",".join(_render(v) for v in row.values()) for row in rows)
        return "\n".join(lines)
    raise ValueError(f"unknown metrics format '{fmt}', expected one of {FORMATS}")
