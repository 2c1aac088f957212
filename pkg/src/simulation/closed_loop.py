"""
This module drives one closed-loop run: plant, flux estimator and controller, all at
the sampling period Ts.

At every tick the harness samples the speed reference and the load, hands the
controller the measured currents and speed together with the ESTIMATED secondary
flux, records the tick, then advances the estimator and the plant by one forward
Euler step under the chosen switch state. The last tick is recorded (with its
control) but not integrated, so a run has exactly duration/Ts + 1 records.

Classes:
    SimulationAbortedError -- The plant state became non-finite or overflowed.
    ClosedLoopSimulation -- One run of one scenario.

Functions:
    - build_controller: Controller instance for a scenario.
    - run: Simulate a scenario, return its trace and metrics.
    - run_many: Simulate independent scenarios in parallel with dask.

Dependencies:
    - dask
    - src.controllers, src.estimators, src.motor
    - src.simulation.metrics, src.simulation.scenario, src.simulation.trace
    - utils.logging_utils
"""

__all__ = [
    'SimulationAbortedError',
    'ClosedLoopSimulation',
    'build_controller',
    'run',
    'run_many',
]

import logging
import os
from typing import Sequence

import dask
import dask.delayed

from src.controllers.base import ControllerInputs, StepDiagnostics, SwitchController
from src.controllers.dtc import DtcConfig, DtcController
from src.controllers.enmpc import ControllerConfig, EnmpcController, PredictionModel
from src.estimators.flux_estimator import FluxEstimate, FluxEstimator, consistent_state
from src.motor.inverter import (
    InverterParams,
    SwitchState,
    VoltageAlphaBeta,
    inverse_clarke,
    phase_voltages,
    switch_count,
    voltage,
)
from src.motor.lim_model import (
    DerivedParams,
    MotorParams,
    MotorState,
    NonFiniteStateError,
    PlantInput,
    derive_params,
    electromagnetic_force,
    euler_step,
)
from src.simulation.metrics import Metrics, compute_metrics
from src.simulation.scenario import Scenario
from src.simulation.trace import Trace
from utils.logging_utils import scenario_logging_context, setup_module_logger

logger: logging.Logger = setup_module_logger(__name__)


class SimulationAbortedError(RuntimeError):
    """
    A run stopped because the plant state became NaN or Inf, or a tick overflowed.

    Attributes:
        tick (int): index of the tick whose integration failed.
        t (float): time of that tick [s].
    """

    def __init__(self, message: str, tick: int, t: float) -> None:
        super().__init__(message)
        self.tick: int = tick
        self.t: float = t


def build_controller(scenario: Scenario) -> SwitchController:
    """
    :param Scenario scenario: provides the controller tuning and the model-side motor.
    :return: a fresh controller for the run.
    :rtype: SwitchController
    """
    if isinstance(scenario.controller, DtcConfig):
        return DtcController(scenario.controller, scenario.Ts)
    model: PredictionModel = PredictionModel(
        scenario.controller_motor, scenario.inverter, scenario.F_L_assumed
    )
    return EnmpcController(scenario.controller, model)


class ClosedLoopSimulation:
    """
    One sequential run of a scenario.

    Attributes:
        scenario (Scenario): the experiment.
        record_timing (bool): store measured controller step times, else 0.0 so that
            traces are reproducible bit for bit.
        controller (SwitchController): the controller under test.
        estimator (FluxEstimator): flux estimator on scenario.flux_estimator_motor.
        plant (MotorState): current plant state.
        transition_count (int): leg transitions between consecutive applied controls.
    """

    def __init__(self, scenario: Scenario, record_timing: bool = True) -> None:
        """
        :param Scenario scenario: the experiment.
        :param bool record_timing: store measured controller step times.
        """
        self.scenario: Scenario = scenario
        self.record_timing: bool = record_timing
        self.inverter: InverterParams = scenario.inverter
        self.plant_derived: DerivedParams = derive_params(scenario.motor)
        self.model_derived: DerivedParams = derive_params(scenario.controller_motor)
        self.controller: SwitchController = build_controller(scenario)
        estimator_motor: MotorParams = scenario.flux_estimator_motor
        self.estimator: FluxEstimator = FluxEstimator(
            estimator_motor,
            derive_params(estimator_motor),
            consistent_state(scenario.initial_state, scenario.motor, self.plant_derived),
        )
        self.plant: MotorState = scenario.initial_state
        self.transition_count: int = 0
        self._u_prev: SwitchState | None = None

    def _preview(self, t: float, w_now: float) -> tuple[float, ...]:
        config: ControllerConfig | DtcConfig = self.scenario.controller
        if not isinstance(config, ControllerConfig):
            return ()
        if not config.preview:
            return (w_now,) * config.N
        return tuple(self.scenario.speed_profile.at(t + dt) for dt in config.prediction_instants)

    def _tick(self, k: int, t: float, trace: Trace) -> SwitchState:
        w_now: float = self.scenario.speed_profile.at(t)
        F_L: float = self.scenario.load_profile.at(t)
        plant: MotorState = self.plant
        estimate: FluxEstimate = self.estimator.estimate(plant.i_as, plant.i_bs)
        measured: MotorState = MotorState(
            plant.i_as, plant.i_bs, estimate.lam_ar_hat, estimate.lam_br_hat, plant.v
        )

        u, diagnostics = self.controller.step(
            ControllerInputs(
                measured=measured,
                stator_flux=(self.estimator.state.lam_as, self.estimator.state.lam_bs),
                force_estimate=electromagnetic_force(measured, self.model_derived),
                w_now=w_now,
                preview=self._preview(t, w_now),
            )
        )
        if self._u_prev is not None:
            self.transition_count += switch_count(self._u_prev, u)
        self._u_prev = u

        trace.set_row(k, self._row(t, w_now, F_L, plant, estimate, u, diagnostics))
        return u

    def _row(
        self,
        t: float,
        w_now: float,
        F_L: float,
        plant: MotorState,
        estimate: FluxEstimate,
        u: SwitchState,
        diagnostics: StepDiagnostics,
    ) -> dict[str, float]:
        i_a, i_b, i_c = inverse_clarke(plant.i_as, plant.i_bs)
        V_a, V_b, V_c = phase_voltages(u, self.inverter)
        return {
            't': t,
            'w': w_now,
            'v': plant.v,
            'i_as': plant.i_as,
            'i_bs': plant.i_bs,
            'i_a': i_a,
            'i_b': i_b,
            'i_c': i_c,
            'lam_ar': plant.lam_ar,
            'lam_br': plant.lam_br,
            'lam_ar_hat': estimate.lam_ar_hat,
            'lam_br_hat': estimate.lam_br_hat,
            'Fe': electromagnetic_force(plant, self.plant_derived),
            'F_L': F_L,
            'u1': u.u1,
            'u2': u.u2,
            'u3': u.u3,
            'V_a': V_a,
            'V_b': V_b,
            'V_c': V_c,
            'E': diagnostics.integral_state,
            'cost': diagnostics.cost,
            'evaluations': diagnostics.full_evaluations,
            'stage_evaluations': diagnostics.stage_evaluations,
            'compute_time': diagnostics.compute_time if self.record_timing else 0.0,
        }

    def _advance(self, t: float, u: SwitchState) -> None:
        V: VoltageAlphaBeta = voltage(u, self.inverter)
        F_L: float = self.scenario.load_profile.at(t)
        self.estimator.step(V, self.plant.i_as, self.plant.i_bs, self.scenario.Ts)
        self.plant = euler_step(
            self.plant,
            PlantInput(V.V_as, V.V_bs, F_L),
            self.scenario.Ts,
            self.scenario.motor,
            self.plant_derived,
        )

    def run(self) -> Trace:
        """
        Simulate the whole scenario.

        :return: one record per sampling instant.
        :rtype: Trace
        :raises SimulationAbortedError: the plant state became non-finite, or a tick
            overflowed.
        """
        n: int = self.scenario.n_ticks
        trace: Trace = Trace.allocate(n)
        for k, t in enumerate(self.scenario.times):
            try:
                u: SwitchState = self._tick(k, float(t), trace)
                if k < n - 1:
                    self._advance(float(t), u)
            except (NonFiniteStateError, ArithmeticError) as exc:
                logger.error("Run '%s' aborted at tick %d (t=%s s)", self.scenario.name, k, t)
                raise SimulationAbortedError(
                    f"scenario '{self.scenario.name}' aborted at tick {k} (t={t} s): "
                    f"{type(exc).__name__}: {exc}",
                    k,
                    float(t),
                ) from exc

        infeasible: int = getattr(self.controller, 'infeasible_steps', 0)
        if infeasible:
            logger.warning("%d steps fell back to the least violating candidate", infeasible)
        return trace


def run(scenario: Scenario, record_timing: bool = True) -> tuple[Trace, Metrics]:
    """
    Simulate a scenario and compute its metrics.

    :param Scenario scenario: the experiment.
    :param bool record_timing: store measured controller step times, else 0.0.
    :rtype: tuple[Trace, Metrics]
    :raises SimulationAbortedError: the plant state became non-finite or overflowed.
    """
    with scenario_logging_context(scenario.name):
        logger.info(
            "Running '%s' with %s controller (%d ticks)",
            scenario.name,
            scenario.kind,
            scenario.n_ticks,
        )
        simulation: ClosedLoopSimulation = ClosedLoopSimulation(scenario, record_timing)
        trace: Trace = simulation.run()
        metrics: Metrics = compute_metrics(trace, scenario)
        logger.info(
            "Done: %.1f transitions/s, tracking RMSE %.4g m/s, max flux %.4g Wb, "
            "max current %.4g A",
            metrics.transitions_per_second,
            metrics.tracking_rmse,
            metrics.max_flux,
            metrics.max_current,
        )
    return trace, metrics


def run_many(
    scenarios: Sequence[Scenario], record_timing: bool = True, scheduler: str | None = None
) -> list[tuple[Trace, Metrics]]:
    """
    Simulate independent scenarios as parallel dask tasks.

    :param Sequence scenarios: experiments, each with its own state.
    :param bool record_timing: store measured controller step times.
    :param str scheduler: dask scheduler, defaults to env variable DASK_SCHEDULER or
        'threads'.
    :return: results in the order of scenarios.
    :rtype: list[tuple[Trace, Metrics]]
    """
    tasks: list[dask.delayed.Delayed] = [
        dask.delayed(run)(scenario, record_timing) for scenario in scenarios
    ]
    logger.info("Running %d scenarios (dask parallelized)...", len(tasks))
    results: tuple[tuple[Trace, Metrics], ...] = dask.compute(
        *tasks, scheduler=scheduler or os.getenv('DASK_SCHEDULER', 'threads')
    )
    return list(results)
