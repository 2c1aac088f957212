# pylint: skip-file
"""
Test for module utils.metrics_formatter
"""

import pytest

from utils.metrics_formatter import MetricsFormatter, format_table


def test_get_property_formatted():
    """
    Test the property getter for formatted.
    """
    formatter = MetricsFormatter({"transitions_per_second": 1542.5})
    assert formatter.formatted is None
    formatter.format()
    assert formatter.formatted == "transitions_per_second=1542.5"


def test_format_kv_keeps_insertion_order():
    formatter = MetricsFormatter({"b": 2, "a": 1.0, "c": "x"})
    assert formatter.format("kv") == "b=2\na=1.0\nc=x"


def test_format_csv():
    formatter = MetricsFormatter({"total_transitions": 30, "tracking_rmse": 0.25})
    assert formatter.format("csv") == "total_transitions,tracking_rmse\n30,0.25"


def test_format_floats_are_lossless():
    """
    Test that floats are rendered in their shortest round-trip form.
    """
    value = 0.1 + 0.2
    text = MetricsFormatter({"x": value}).format()
    assert float(text.split("=")[1]) == value


def test_format_infinite_settling_time():
    assert MetricsFormatter({"settling_time_1": float("inf")}).format() == "settling_time_1=inf"


def test_format_invalid_metrics():
    """
    Test formatting with an invalid metrics argument (type list unsupported).
    """
    with pytest.raises(ValueError, match="metrics must be a mapping"):
        MetricsFormatter(["lists", "are", "invalid"])


def test_format_unknown_format():
    with pytest.raises(ValueError, match="unknown metrics format"):
        MetricsFormatter({"a": 1}).format("json")


def test_format_empty_metrics():
    assert MetricsFormatter({}).format() == ""


def test_format_table_kv_blocks():
    rows = [{"controller": "enmpc", "rmse": 0.5}, {"controller": "dtc", "rmse": 1.5}]
    assert format_table(rows, "kv") == "controller=enmpc\nrmse=0.5\n\ncontroller=dtc\nrmse=1.5"


def test_format_table_csv_single_header():
    rows = [{"controller": "enmpc", "rmse": 0.5}, {"controller": "dtc", "rmse": 1.5}]
    assert format_table(rows, "csv") == "controller,rmse\nenmpc,0.5\ndtc,1.5"


def test_format_table_csv_empty():
    assert format_table([], "csv") == ""


def test_format_table_unknown_format():
    with pytest.raises(ValueError):
        format_table([{"a": 1}], "xml")
