"""
This module measures the per-step compute time of the controllers in closed loop.

The 100 us bound on the mean ENMPC step is soft: a miss is logged as a warning,
since it depends on the host.

Classes:
    LatencyReport -- Distribution of controller step times.

Functions:
    - latency_report: Summarize step times.
    - benchmark: Time a (shortened) closed-loop run.
    - schedule_variants: Multi-rate, single-rate N = 10 and Nu = 2 configurations.
    - compare_schedules: Benchmark every schedule variant on one scenario.
"""

__all__ = [
    'LatencyReport',
    'SOFT_BOUND',
    'latency_report',
    'benchmark',
    'schedule_variants',
    'compare_schedules',
]

from dataclasses import asdict, dataclass, replace
import logging

import numpy as np

from src.controllers.enmpc import ControllerConfig
from src.simulation.closed_loop import run
from src.simulation.scenario import Scenario
from utils.logging_utils import setup_module_logger

logger: logging.Logger = setup_module_logger(__name__)

SOFT_BOUND: float = 100.0e-6


@dataclass(frozen=True)
class LatencyReport:
    """
    Attributes:
        label (str): what was timed.
        samples (int): number of controller steps.
        mean, p50, p95, p99, max (float): step time statistics [s].
    """

    label: str
    samples: int
    mean: float
    p50: float
    p95: float
    p99: float
    max: float

    def as_dict(self) -> dict[str, float | int | str]:
        return asdict(self)


def latency_report(label: str, times: np.ndarray) -> LatencyReport:
    """
    :param str label: what was timed.
    :param np.ndarray times: step times [s], at least one.
    :rtype: LatencyReport
    """
    p50, p95, p99 = np.percentile(times, [50.0, 95.0, 99.0])
    return LatencyReport(
        label=label,
        samples=int(times.size),
        mean=float(np.mean(times)),
        p50=float(p50),
        p95=float(p95),
        p99=float(p99),
        max=float(np.max(times)),
    )


def benchmark(
    scenario: Scenario, duration: float | None = None, label: str | None = None
) -> LatencyReport:
    """
    Run the scenario in closed loop, possibly shortened, and summarize the step times.

    :param Scenario scenario: the experiment.
    :param float duration: simulated time [s], the scenario's own by default.
    :param str label: report label, the scenario name by default.
    :rtype: LatencyReport
    """
    if duration is not None:
        scenario = replace(scenario, duration=max(duration, scenario.Ts))
    trace, _ = run(scenario, record_timing=True)
    report: LatencyReport = latency_report(label or scenario.name, trace['compute_time'])
    if scenario.kind == 'enmpc' and report.mean > SOFT_BOUND:
        logger.warning(
            "Mean controller step %.1f us exceeds the %.0f us soft bound (%s)",
            report.mean * 1e6,
            SOFT_BOUND * 1e6,
            report.label,
        )
    return report


def schedule_variants(base: ControllerConfig, Ts: float) -> dict[str, ControllerConfig]:
    """
    :param ControllerConfig base: tuning shared by the variants.
    :param float Ts: sampling period [s].
    :return: label -> configuration for the multi-rate default, the single-rate
        N = 10 grid and the multi-rate grid with Nu = 2.
    :rtype: dict[str, ControllerConfig]
    """
    multi_rate: tuple[tuple[float, int], ...] = ((Ts, 2), (4.0 * Ts, 2))
    return {
        'multi-rate N=4 Nu=1': replace(base, schedule=multi_rate, Nu=1, P_sw=base.P_sw[:1]),
        'single-rate N=10 Nu=1': replace(base, schedule=((Ts, 10),), Nu=1, P_sw=base.P_sw[:1]),
        'multi-rate N=4 Nu=2': replace(
            base, schedule=multi_rate, Nu=2, P_sw=(base.P_sw[0], base.P_sw[0] / 2.0)
        ),
    }


def compare_schedules(scenario: Scenario, duration: float | None = None) -> list[LatencyReport]:
    """
    Benchmark the prediction grid variants on an ENMPC scenario.

    :param Scenario scenario: ENMPC scenario.
    :param float duration: simulated time per variant [s].
    :rtype: list[LatencyReport]
    :raises ValueError: the scenario does not run the ENMPC.
    """
    if not isinstance(scenario.controller, ControllerConfig):
        raise ValueError("schedule comparison needs an ENMPC scenario")
    return [
        benchmark(scenario.with_controller(config), duration, label)
        for label, config in schedule_variants(scenario.controller, scenario.Ts).items()
    ]
