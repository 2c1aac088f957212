"""
This module holds the per-tick record of a closed-loop run and its file formats.

The CSV trace is the normative output: a fixed header naming every column, one row
per sampling instant, floats written with repr() so that reading a trace back gives
the recorded values to the last bit. A netCDF export through xarray is provided for
downstream plotting.

Classes:
    TraceIOError -- Raised when a trace cannot be written or read.
    Trace -- Column store of a run, one numpy array per column.

Functions:
    - write_trace: Persist a trace as CSV.
    - read_trace: Parse a CSV trace.
    - write_trace_netcdf: Persist a trace as netCDF.

Dependencies:
    - csv
    - numpy
    - xarray
"""

__all__ = [
    'TraceIOError',
    'Trace',
    'TRACE_COLUMNS',
    'INTEGER_COLUMNS',
    'COLUMN_UNITS',
    'write_trace',
    'read_trace',
    'write_trace_netcdf',
]

import csv
import logging
from typing import Iterable, Mapping

import numpy as np
import xarray as xr

from utils.logging_utils import setup_module_logger

logger: logging.Logger = setup_module_logger(__name__)

TRACE_COLUMNS: tuple[str, ...] = (
    't',
    'w',
    'v',
    'i_as',
    'i_bs',
    'i_a',
    'i_b',
    'i_c',
    'lam_ar',
    'lam_br',
    'lam_ar_hat',
    'lam_br_hat',
    'Fe',
    'F_L',
    'u1',
    'u2',
    'u3',
    'V_a',
    'V_b',
    'V_c',
    'E',
    'cost',
    'evaluations',
    'stage_evaluations',
    'compute_time',
)
INTEGER_COLUMNS: frozenset[str] = frozenset(
    {'u1', 'u2', 'u3', 'evaluations', 'stage_evaluations'}
)

COLUMN_UNITS: dict[str, str] = {
    't': 's',
    'w': 'm/s',
    'v': 'm/s',
    'i_as': 'A',
    'i_bs': 'A',
    'i_a': 'A',
    'i_b': 'A',
    'i_c': 'A',
    'lam_ar': 'Wb',
    'lam_br': 'Wb',
    'lam_ar_hat': 'Wb',
    'lam_br_hat': 'Wb',
    'Fe': 'N',
    'F_L': 'N',
    'V_a': 'V',
    'V_b': 'V',
    'V_c': 'V',
    'compute_time': 's',
}


class TraceIOError(OSError):
    """
    A trace file could not be written or parsed.
    """


class Trace:
    """
    Column store of one run.

    Attributes:
        columns (dict[str, np.ndarray]): one array per name of TRACE_COLUMNS, all of
            the same length.
    """

    def __init__(self, columns: Mapping[str, Iterable[float]]) -> None:
        """
        :param Mapping columns: values for every name of TRACE_COLUMNS.
        :raises ValueError: missing or unknown columns, or unequal lengths.
        """
        missing: set[str] = set(TRACE_COLUMNS) - set(columns)
        unknown: set[str] = set(columns) - set(TRACE_COLUMNS)
        if missing or unknown:
            raise ValueError(
                f"trace columns mismatch (missing {sorted(missing)}, unknown {sorted(unknown)})"
            )
        self.columns: dict[str, np.ndarray] = {
            name: np.asarray(
                columns[name], dtype=np.int64 if name in INTEGER_COLUMNS else np.float64
            )
            for name in TRACE_COLUMNS
        }
        lengths: set[int] = {len(array) for array in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"trace columns have different lengths {sorted(lengths)}")

    @classmethod
    def allocate(cls, n: int) -> 'Trace':
        """
        :param int n: number of records.
        :return: a zero-filled trace to be filled with set_row().
        :rtype: Trace
        """
        return cls({name: np.zeros(n) for name in TRACE_COLUMNS})

    def set_row(self, k: int, row: Mapping[str, float]) -> None:
        """
        Fill record k. Columns absent from row keep their value.
        """
        for name, value in row.items():
            self.columns[name][k] = value

    def __len__(self) -> int:
        return len(self.columns['t'])

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    @property
    def controls(self) -> np.ndarray:
        """
        :return: applied switch states, shape (n, 3).
        :rtype: np.ndarray
        """
        return np.column_stack([self.columns['u1'], self.columns['u2'], self.columns['u3']])

    def equals(self, other: 'Trace') -> bool:
        """
        :return: True when every column is bit-identical.
        :rtype: bool
        """
        return all(
            np.array_equal(self.columns[name], other.columns[name]) for name in TRACE_COLUMNS
        )

    def to_dataset(self, attrs: Mapping[str, object] | None = None) -> xr.Dataset:
        """
        :param Mapping attrs: global attributes, e.g. scenario name and controller kind.
        :return: the trace as a Dataset indexed by time.
        :rtype: xr.Dataset
        """
        dataset: xr.Dataset = xr.Dataset(
            {name: ('t', self.columns[name]) for name in TRACE_COLUMNS if name != 't'},
            coords={'t': self.columns['t']},
            attrs=dict(attrs or {}),
        )
        for name, unit in COLUMN_UNITS.items():
            dataset[name].attrs['units'] = unit
        return dataset


def _format(name: str, value: np.generic) -> str:
    if name in INTEGER_COLUMNS:
        return str(int(value))
    return repr(float(value))


def write_trace(trace: Trace, path: str) -> None:
    """
    Write a trace as CSV: header row then one row per record, floats at full precision.

    :param Trace trace: trace to persist.
    :param str path: output file.
    :raises TraceIOError: the file cannot be written.
    """
    try:
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(TRACE_COLUMNS)
            for k in range(len(trace)):
                writer.writerow([_format(name, trace.columns[name][k]) for name in TRACE_COLUMNS])
    except OSError as exc:
        raise TraceIOError(exc.errno, f"cannot write trace: {exc.strerror}", path) from exc
    logger.debug("Wrote %d trace records to %s", len(trace), path)


def read_trace(path: str) -> Trace:
    """
    Parse a CSV trace written by write_trace.

    :param str path: trace file.
    :rtype: Trace
    :raises TraceIOError: the file cannot be read or is not a trace.
    """
    try:
        with open(path, encoding='utf-8', newline='') as handle:
            rows: list[list[str]] = list(csv.reader(handle))
    except OSError as exc:
        raise TraceIOError(exc.errno, f"cannot read trace: {exc.strerror}", path) from exc

    if not rows or tuple(rows[0]) != TRACE_COLUMNS:
        raise TraceIOError(f"{path}: header does not match the trace columns")
    values: dict[str, list[float]] = {name: [] for name in TRACE_COLUMNS}
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != len(TRACE_COLUMNS):
            raise TraceIOError(f"{path}:{line}: expected {len(TRACE_COLUMNS)} fields")
        try:
            for name, field in zip(TRACE_COLUMNS, row):
                values[name].append(int(field) if name in INTEGER_COLUMNS else float(field))
        except ValueError as exc:
            raise TraceIOError(f"{path}:{line}: {exc}") from exc
    return Trace(values)


def write_trace_netcdf(
    trace: Trace, path: str, attrs: Mapping[str, object] | None = None
) -> None:
    """
    Persist a trace as netCDF through xarray.

    :param Trace trace: trace to persist.
    :param str path: output file.
    :param Mapping attrs: global attributes.
    :raises TraceIOError: the file cannot be written.
    """
    try:
        trace.to_dataset(attrs).to_netcdf(path, engine='netcdf4')
    except OSError as exc:
        raise TraceIOError(exc.errno, f"cannot write netCDF trace: {exc.strerror}", path) from exc
    logger.debug("Wrote netCDF trace to %s", path)
