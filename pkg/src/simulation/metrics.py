"""
This module computes the summary figures of a closed-loop trace.

Steady segments are the last 20 % of every interval between consecutive profile
events (speed-profile slope changes, load steps) and the last 20 % of the run.
Switching frequency sums the transitions of the three inverter legs.

Classes:
    Metrics -- Summary of one run.

Functions:
    - compute_metrics: Metrics of a trace.
    - transitions: Total leg transitions over consecutive records.
    - steady_mask: Boolean mask of the steady-segment samples.
"""

__all__ = [
    'Metrics',
    'STEADY_FRACTION',
    'SETTLING_BAND',
    'compute_metrics',
    'transitions',
    'steady_mask',
]

from dataclasses import asdict, dataclass
import logging
import math

import numpy as np

from src.simulation.scenario import Scenario
from src.simulation.trace import Trace
from utils.logging_utils import setup_module_logger

logger: logging.Logger = setup_module_logger(__name__)

STEADY_FRACTION: float = 0.2
SETTLING_BAND: float = 0.01


@dataclass(frozen=True)
class Metrics:
    """
    Attributes:
        transitions_per_second (float): leg transitions per second, summed over legs.
        total_transitions (int): leg transitions over the run.
        tracking_rmse (float): RMS of w - v over the steady segments [m/s].
        settling_times (tuple[float, ...]): per load step, time until v re-enters and
            stays within 1 % of w (inf if it never does before the next event) [s].
        force_ripple (float): largest peak-to-peak thrust over the steady segments [N].
        max_flux (float): largest plant secondary flux magnitude [Wb].
        max_current (float): largest plant primary current magnitude [A].
        mean_compute_time (float): mean controller step time [s].
        max_compute_time (float): largest controller step time [s].
    """

    transitions_per_second: float
    total_transitions: int
    tracking_rmse: float
    settling_times: tuple[float, ...]
    force_ripple: float
    max_flux: float
    max_current: float
    mean_compute_time: float
    max_compute_time: float

    def as_dict(self) -> dict[str, float | int]:
        """
        :return: flat mapping, settling times as settling_time_1, settling_time_2, ...
        :rtype: dict[str, float | int]
        """
        flat: dict[str, float | int] = {
            key: value for key, value in asdict(self).items() if key != 'settling_times'
        }
        for index, value in enumerate(self.settling_times, start=1):
            flat[f'settling_time_{index}'] = value
        return flat


def transitions(trace: Trace) -> int:
    """
    :return: sum of switch_count over consecutive records.
    :rtype: int
    """
    return int(np.abs(np.diff(trace.controls, axis=0)).sum())


def _boundaries(scenario: Scenario) -> list[float]:
    return [0.0, *scenario.events, scenario.duration]


def steady_mask(t: np.ndarray, scenario: Scenario) -> np.ndarray:
    """
    :param np.ndarray t: record times.
    :param Scenario scenario: provides the events and the duration.
    :return: True for samples in the last 20 % before each event and of the run.
    :rtype: np.ndarray
    """
    bounds: list[float] = _boundaries(scenario)
    mask: np.ndarray = np.zeros(len(t), dtype=bool)
    for start, end in zip(bounds, bounds[1:]):
        lower: float = end - STEADY_FRACTION * (end - start)
        if end == scenario.duration:
            mask |= (t >= lower) & (t <= end)
        else:
            mask |= (t >= lower) & (t < end)
    return mask


def _settling_time(trace: Trace, step_time: float, window_end: float) -> float:
    t: np.ndarray = trace['t']
    window: np.ndarray = (t >= step_time) & (t <= window_end)
    if not window.any():
        return 0.0
    reference: np.ndarray = trace['w'][window]
    outside: np.ndarray = np.abs(trace['v'][window] - reference) > SETTLING_BAND * np.abs(reference)
    if not outside.any():
        return 0.0
    last: int = int(np.flatnonzero(outside)[-1])
    times: np.ndarray = t[window]
    if last == len(times) - 1:
        return math.inf
    return float(times[last + 1] - step_time)


def compute_metrics(trace: Trace, scenario: Scenario) -> Metrics:
    """
    :param Trace trace: complete trace of the run.
    :param Scenario scenario: the scenario that produced it.
    :rtype: Metrics
    """
    total: int = transitions(trace)
    mask: np.ndarray = steady_mask(trace['t'], scenario)
    error: np.ndarray = trace['w'][mask] - trace['v'][mask]
    rmse: float = float(np.sqrt(np.mean(error**2))) if error.size else 0.0

    bounds: list[float] = _boundaries(scenario)
    ripple: float = 0.0
    for start, end in zip(bounds, bounds[1:]):
        lower: float = end - STEADY_FRACTION * (end - start)
        segment: np.ndarray = trace['Fe'][(trace['t'] >= lower) & (trace['t'] <= end)]
        if segment.size:
            ripple = max(ripple, float(np.ptp(segment)))

    settling: list[float] = []
    for step_time in scenario.load_profile.events:
        if not 0.0 < step_time < scenario.duration:
            continue
        following: list[float] = [b for b in bounds if b > step_time]
        settling.append(_settling_time(trace, step_time, following[0]))

    compute_time: np.ndarray = trace['compute_time']
    metrics: Metrics = Metrics(
        transitions_per_second=total / scenario.duration,
        total_transitions=total,
        tracking_rmse=rmse,
        settling_times=tuple(settling),
        force_ripple=ripple,
        max_flux=float(np.max(np.hypot(trace['lam_ar'], trace['lam_br']))),
        max_current=float(np.max(np.hypot(trace['i_as'], trace['i_bs']))),
        mean_compute_time=float(np.mean(compute_time)),
        max_compute_time=float(np.max(compute_time)),
    )
    logger.debug("Metrics of '%s': %s", scenario.name, metrics)
    return metrics
