"""
This module contains the enumerative nonlinear model predictive controller (ENMPC).

At every sampling instant the controller enumerates the 8^Nu sequences of inverter
switch states over the control horizon, predicts the motor with the forward-Euler
model along a multi-rate grid (controls held beyond the control horizon), and keeps
the sequence with the lowest cost. The cost of one prediction step is

    Q*(v_hat - w)^2 + P_E*E_hat^2 + P_sw[j]*switch_count(u_j, u_{j-1})   (switch term for j < Nu)

where E_hat propagates the integral-error recursion along the predicted speeds. The
accumulated error integrates the speed error relative to speed_scale, once per
sampling period, and is clamped to +-E_sat; along the prediction each increment is
weighted by the duration of the step it covers. A sequence violating the flux or
current limit at any step, or whose prediction overflows, costs +inf. The pruned
search abandons a sequence as soon as its running cost exceeds the incumbent; it
returns the same minimizer as the exhaustive search because both keep the first
minimizer found in enumeration order.

Classes:
    ControllerConfig -- Weights, horizons, multi-rate schedule and limits.
    ControllerState -- Accumulated tracking error and last applied control.
    CandidateSequence -- Switch states over the control horizon and their cost.
    ReferencePreview -- Speed reference at each prediction instant.
    PredictionModel -- Model-side motor, derived constants and inverter voltages.
    PredictionStep -- One predicted step with its constraint ratios.
    SearchResult -- Outcome of a search, with evaluation counters.
    EnmpcController -- Stateful controller used by the closed-loop harness.

Functions:
    - default_config, predict, iter_prediction, stage_cost, evaluate_sequence,
      search_exhaustive, search_pruned, search_parallel, update_error, control_step

Dependencies:
    - dask: parallel candidate evaluation.
"""

__all__ = [
    'ControllerConfig',
    'ControllerState',
    'CandidateSequence',
    'ReferencePreview',
    'PredictionModel',
    'PredictionStep',
    'SequenceEvaluation',
    'SearchResult',
    'EnmpcController',
    'default_config',
    'candidate_sequences',
    'iter_prediction',
    'predict',
    'stage_cost',
    'evaluate_sequence',
    'search_exhaustive',
    'search_pruned',
    'search_parallel',
    'update_error',
    'control_step',
]

from dataclasses import dataclass, field
import functools
import itertools
import logging
import math
import os
import time
from typing import Callable, Iterator, NamedTuple, Sequence

import dask
import dask.delayed

from src.controllers.base import ControllerInputs, StepDiagnostics
from src.motor.inverter import (
    SWITCH_STATES,
    InverterParams,
    SwitchState,
    VoltageAlphaBeta,
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
    euler_step,
    simulate_fine,
)
from utils.logging_utils import setup_module_logger

logger: logging.Logger = setup_module_logger(__name__)

INF: float = math.inf


@dataclass(frozen=True)
class ControllerConfig:
    """
    ENMPC configuration.

    Attributes:
        Q (float): speed tracking weight.
        P_E (float): weight of the predicted accumulated error.
        P_sw (tuple[float, ...]): switch penalties P_0..P_{Nu-1}, strictly decreasing.
        K_gain (float): integral gain of the accumulated error, per sampling period.
        E_sat (float): the accumulated error is clamped to +-E_sat.
        speed_scale (float): speed the tracking error is divided by before it is
            integrated [m/s]; scenarios use the largest reference speed.
        Nu (int): control horizon.
        schedule (tuple[tuple[float, int], ...]): (step duration [s], repeat count)
            segments of the prediction grid.
        lam_max (float): secondary flux magnitude limit [Wb].
        i_max (float): primary current magnitude limit [A].
        preview (bool): use the future reference over the horizon, else hold w_now.
        parallel_candidates (bool): evaluate all candidates as parallel tasks.
        coarse_substeps (int): Euler sub-steps for prediction steps longer than the
            first segment's step (1 = plain forward Euler).
    """

    Q: float = 1.0e6
    P_E: float = 500.0
    P_sw: tuple[float, ...] = (1.0,)
    K_gain: float = 22.5
    E_sat: float = 1000.0
    speed_scale: float = 1.0
    Nu: int = 1
    schedule: tuple[tuple[float, int], ...] = ((1.0e-4, 2), (4.0e-4, 2))
    lam_max: float = 0.45
    i_max: float = 50.0
    preview: bool = True
    parallel_candidates: bool = False
    coarse_substeps: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, 'P_sw', tuple(float(x) for x in self.P_sw))
        object.__setattr__(
            self, 'schedule', tuple((float(dt), int(n)) for dt, n in self.schedule)
        )
        for name in ('Q', 'P_E', 'K_gain'):
            if not getattr(self, name) >= 0.0:
                raise ValueError(f"ControllerConfig.{name} must be >= 0")
        for name in ('E_sat', 'speed_scale', 'lam_max', 'i_max'):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"ControllerConfig.{name} must be > 0")
        if self.Nu < 1:
            raise ValueError("ControllerConfig.Nu must be >= 1")
        if len(self.P_sw) != self.Nu:
            raise ValueError(f"ControllerConfig.P_sw needs Nu={self.Nu} entries")
        if any(not x > 0.0 for x in self.P_sw):
            raise ValueError("ControllerConfig.P_sw entries must be > 0")
        if any(a <= b for a, b in zip(self.P_sw, self.P_sw[1:])):
            raise ValueError("ControllerConfig.P_sw must be strictly decreasing")
        if not self.schedule or any(dt <= 0.0 or n < 1 for dt, n in self.schedule):
            raise ValueError("ControllerConfig.schedule needs (duration > 0, count >= 1) pairs")
        if self.N < self.Nu:
            raise ValueError(f"prediction steps N={self.N} must be >= Nu={self.Nu}")
        if self.coarse_substeps < 1:
            raise ValueError("ControllerConfig.coarse_substeps must be >= 1")

    @property
    def step_durations(self) -> tuple[float, ...]:
        """
        :return: duration of every prediction step, in order.
        :rtype: tuple[float, ...]
        """
        return tuple(dt for dt, n in self.schedule for _ in range(n))

    @property
    def N(self) -> int:  # pylint: disable=invalid-name
        """
        :return: number of prediction steps.
        :rtype: int
        """
        return sum(n for _, n in self.schedule)

    @property
    def prediction_interval(self) -> float:
        """
        :return: time covered by the prediction [s].
        :rtype: float
        """
        return sum(dt * n for dt, n in self.schedule)

    @property
    def prediction_instants(self) -> tuple[float, ...]:
        """
        :return: offsets from now of the predicted states 1..N [s].
        :rtype: tuple[float, ...]
        """
        return tuple(itertools.accumulate(self.step_durations))


def default_config(Ts: float = 1.0e-4) -> ControllerConfig:
    """
    Default tuning: Nu = 1, two steps of Ts then two steps of 4*Ts (10*Ts covered with
    4 prediction steps), Q = 1e6, P_E = 500, P_sw = [1], K_gain = 22.5.

    :param float Ts: sampling period [s].
    :rtype: ControllerConfig
    """
    return ControllerConfig(schedule=((Ts, 2), (4.0 * Ts, 2)))


class ControllerState(NamedTuple):
    """
    Attributes:
        E (float): accumulated tracking error.
        u_prev (SwitchState): last applied switch state.
    """

    E: float = 0.0
    u_prev: SwitchState = SwitchState(0, 0, 0)


class CandidateSequence(NamedTuple):
    """
    Switch states over the control horizon and the cost of the sequence (+inf when a
    predicted step violates a constraint).
    """

    controls: tuple[SwitchState, ...]
    cost: float


class ReferencePreview(NamedTuple):
    """
    Speed reference [m/s] at the instants of the predicted states 1..N.
    """

    w: tuple[float, ...]


@dataclass(frozen=True)
class PredictionModel:
    """
    Model-side data of the predictor.

    Attributes:
        motor (MotorParams): nominal motor constants.
        inverter (InverterParams): DC link.
        F_L_assumed (float): load force assumed over the horizon [N].
        derived (DerivedParams): derive_params(motor).
        voltages (dict[SwitchState, VoltageAlphaBeta]): voltage of every switch state.
    """

    motor: MotorParams
    inverter: InverterParams
    F_L_assumed: float = 0.0
    derived: DerivedParams = field(init=False, compare=False)
    voltages: dict[SwitchState, VoltageAlphaBeta] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        object.__setattr__(self, 'derived', derive_params(self.motor))
        object.__setattr__(
            self, 'voltages', {u: voltage(u, self.inverter) for u in SWITCH_STATES}
        )


class PredictionStep(NamedTuple):
    """
    One predicted step.

    Attributes:
        state (MotorState): predicted state at the end of the step.
        E_hat (float): predicted accumulated error at that instant.
        flux_ratio (float): |lam_r| / lam_max.
        current_ratio (float): |i_s| / i_max.
    """

    state: MotorState
    E_hat: float
    flux_ratio: float
    current_ratio: float

    @property
    def flux_violated(self) -> bool:
        """True when the secondary flux magnitude exceeds lam_max."""
        return self.flux_ratio > 1.0

    @property
    def current_violated(self) -> bool:
        """True when the primary current magnitude exceeds i_max."""
        return self.current_ratio > 1.0

    @property
    def violated(self) -> bool:
        """True when any constraint is violated."""
        return self.flux_ratio > 1.0 or self.current_ratio > 1.0


class SequenceEvaluation(NamedTuple):
    """
    Full evaluation of one candidate.

    Attributes:
        cost (float): total cost, +inf if infeasible.
        max_violation (float): largest relative constraint excess over the horizon
            (<= 0 when feasible).
        running_costs (tuple[float, ...]): cost accumulated after each step, up to the
            first violated step.
        first_violation (int | None): index of the first violated step.
    """

    cost: float
    max_violation: float
    running_costs: tuple[float, ...] = ()
    first_violation: int | None = None


@dataclass(frozen=True)
class SearchResult:
    """
    Attributes:
        sequence (CandidateSequence): selected sequence and its cost.
        full_evaluations (int): candidates whose cost was accumulated to the horizon end.
        stage_evaluations (int): stage costs computed.
        all_infeasible (bool): every candidate violated a constraint; `sequence` is
            then the candidate with the smallest maximum relative violation.
    """

    sequence: CandidateSequence
    full_evaluations: int
    stage_evaluations: int
    all_infeasible: bool = False

    @property
    def cost(self) -> float:
        """Cost of the selected sequence."""
        return self.sequence.cost


@functools.lru_cache(maxsize=None)
def candidate_sequences(Nu: int) -> tuple[tuple[SwitchState, ...], ...]:
    """
    :return: all 8^Nu control sequences, lexicographic in the canonical state order.
    :rtype: tuple[tuple[SwitchState, ...], ...]
    """
    return tuple(itertools.product(SWITCH_STATES, repeat=Nu))


def _integrate_error(E: float, error: float, gain: float, E_sat: float) -> float:
    return min(max(E + gain * error, -E_sat), E_sat)


def iter_prediction(
    s0: MotorState,
    E0: float,
    controls: Sequence[SwitchState],
    ref: ReferencePreview,
    cfg: ControllerConfig,
    model: PredictionModel,
) -> Iterator[PredictionStep]:
    """
    Lazily predict the N steps of a candidate sequence.

    The control of step j is controls[min(j, Nu-1)]. E_hat of the first predicted
    state is E0; later values follow
    E_hat += K_gain/speed_scale * (w - v_hat) * dt_{j-1}/dt_0 at the previous
    predicted state, clamped like update_error(). A step whose state or tracking
    term overflows is yielded with infinite constraint ratios and ends the
    prediction.

    :param MotorState s0: measured state (with estimated flux).
    :param float E0: accumulated error after this instant's update.
    :param Sequence[SwitchState] controls: Nu switch states.
    :param ReferencePreview ref: N reference values.
    :rtype: Iterator[PredictionStep]
    """
    if len(controls) != cfg.Nu:
        raise ValueError(f"expected {cfg.Nu} controls, got {len(controls)}")
    if len(ref.w) != cfg.N:
        raise ValueError(f"expected {cfg.N} reference values, got {len(ref.w)}")

    durations: tuple[float, ...] = cfg.step_durations
    base_dt: float = durations[0]
    gain: float = cfg.K_gain / cfg.speed_scale
    last: int = cfg.Nu - 1
    s: MotorState = s0
    E_hat: float = E0
    for j, dt in enumerate(durations):
        if j > 0:
            E_hat = _integrate_error(
                E_hat, ref.w[j - 1] - s.v, gain * durations[j - 1] / base_dt, cfg.E_sat
            )
        V: VoltageAlphaBeta = model.voltages[controls[min(j, last)]]
        inp: PlantInput = PlantInput(V.V_as, V.V_bs, model.F_L_assumed)
        try:
            if cfg.coarse_substeps > 1 and dt > base_dt:
                s = simulate_fine(s, inp, dt, cfg.coarse_substeps, model.motor, model.derived)
            else:
                s = euler_step(s, inp, dt, model.motor, model.derived)
            bounded: bool = math.isfinite(cfg.Q * (s.v - ref.w[j]) ** 2)
        except (NonFiniteStateError, ArithmeticError):
            bounded = False
        if not bounded:
            yield PredictionStep(state=s, E_hat=E_hat, flux_ratio=INF, current_ratio=INF)
            return
        yield PredictionStep(
            state=s,
            E_hat=E_hat,
            flux_ratio=math.hypot(s.lam_ar, s.lam_br) / cfg.lam_max,
            current_ratio=math.hypot(s.i_as, s.i_bs) / cfg.i_max,
        )


def predict(
    s0: MotorState,
    E0: float,
    seq: CandidateSequence | Sequence[SwitchState],
    ref: ReferencePreview,
    F_L_assumed: float,
    cfg: ControllerConfig,
    motor: MotorParams,
    inverter: InverterParams,
) -> list[PredictionStep]:
    """
    Predict the whole horizon of one candidate sequence.

    :param seq: a CandidateSequence or its controls.
    :param float F_L_assumed: load force assumed over the horizon [N].
    :return: N predicted steps (state, E_hat, constraint ratios).
    :rtype: list[PredictionStep]
    """
    controls = seq.controls if isinstance(seq, CandidateSequence) else seq
    model: PredictionModel = PredictionModel(motor, inverter, F_L_assumed)
    return list(iter_prediction(s0, E0, controls, ref, cfg, model))


def stage_cost(
    v_hat: float,
    w_j: float,
    E_hat: float,
    u_j: SwitchState,
    u_prev_j: SwitchState,
    cfg: ControllerConfig,
    step_index: int,
) -> float:
    """
    Cost of one prediction step; the switch term is charged for step_index < Nu only.

    :param int step_index: 0-based prediction step, < N.
    :rtype: float
    """
    if not 0 <= step_index < cfg.N:
        raise ValueError(f"step_index {step_index} outside [0, {cfg.N})")
    cost: float = cfg.Q * (v_hat - w_j) ** 2 + cfg.P_E * E_hat**2
    if step_index < cfg.Nu:
        cost += cfg.P_sw[step_index] * switch_count(u_prev_j, u_j)
    return cost


def _step_controls(
    controls: Sequence[SwitchState], u_prev: SwitchState, j: int, last: int
) -> tuple[SwitchState, SwitchState]:
    u_j: SwitchState = controls[min(j, last)]
    u_prev_j: SwitchState = u_prev if j == 0 else controls[min(j - 1, last)]
    return u_j, u_prev_j


def evaluate_sequence(
    s0: MotorState,
    ctrl_state: ControllerState,
    controls: Sequence[SwitchState],
    ref: ReferencePreview,
    cfg: ControllerConfig,
    model: PredictionModel,
) -> SequenceEvaluation:
    """
    Accumulate the cost of a candidate over the whole horizon, without pruning.
    Stage costs stop at the first violated step; the constraint ratios of the later
    steps still count in max_violation.

    :rtype: SequenceEvaluation
    """
    last: int = cfg.Nu - 1
    cost: float = 0.0
    running: list[float] = []
    first_violation: int | None = None
    max_violation: float = -INF
    for j, step in enumerate(iter_prediction(s0, ctrl_state.E, controls, ref, cfg, model)):
        max_violation = max(max_violation, step.flux_ratio - 1.0, step.current_ratio - 1.0)
        if first_violation is not None:
            continue
        if step.violated:
            first_violation = j
            continue
        u_j, u_prev_j = _step_controls(controls, ctrl_state.u_prev, j, last)
        cost += stage_cost(step.state.v, ref.w[j], step.E_hat, u_j, u_prev_j, cfg, j)
        running.append(cost)
    return SequenceEvaluation(
        cost if first_violation is None else INF, max_violation, tuple(running), first_violation
    )


def _least_violating(
    candidates: Sequence[tuple[SwitchState, ...]], evaluations: Sequence[SequenceEvaluation]
) -> tuple[SwitchState, ...]:
    best: int = min(range(len(candidates)), key=lambda i: (evaluations[i].max_violation, i))
    return candidates[best]


def _select(
    candidates: Sequence[tuple[SwitchState, ...]],
    evaluations: Sequence[SequenceEvaluation],
    n_steps: int,
) -> SearchResult:
    # strict '<' keeps the first minimizer in enumeration order
    best_index: int = -1
    best_cost: float = INF
    for i, evaluation in enumerate(evaluations):
        if evaluation.cost < best_cost:
            best_index, best_cost = i, evaluation.cost
    stages: int = len(candidates) * n_steps
    if best_index < 0:
        return SearchResult(
            CandidateSequence(_least_violating(candidates, evaluations), INF),
            full_evaluations=len(candidates),
            stage_evaluations=stages,
            all_infeasible=True,
        )
    return SearchResult(
        CandidateSequence(candidates[best_index], best_cost),
        full_evaluations=len(candidates),
        stage_evaluations=stages,
    )


def search_exhaustive(
    s0: MotorState,
    ctrl_state: ControllerState,
    ref: ReferencePreview,
    cfg: ControllerConfig,
    model: PredictionModel,
) -> SearchResult:
    """
    Evaluate all 8^Nu sequences over the full horizon and keep the first minimizer in
    enumeration order. Used as the reference for search_pruned.

    :param ControllerState ctrl_state: state after this instant's error update.
    :rtype: SearchResult
    """
    candidates = candidate_sequences(cfg.Nu)
    evaluations: list[SequenceEvaluation] = [
        evaluate_sequence(s0, ctrl_state, controls, ref, cfg, model) for controls in candidates
    ]
    return _select(candidates, evaluations, cfg.N)


def _pruned_outcome(
    candidates: Sequence[tuple[SwitchState, ...]],
    best_index: int,
    J_opt: float,
    full_evaluations: int,
    stage_evaluations: int,
    evaluations: Callable[[], Sequence[SequenceEvaluation]],
) -> SearchResult:
    if best_index < 0:
        return SearchResult(
            CandidateSequence(_least_violating(candidates, evaluations()), INF),
            full_evaluations=full_evaluations,
            stage_evaluations=stage_evaluations,
            all_infeasible=True,
        )
    return SearchResult(
        CandidateSequence(candidates[best_index], J_opt),
        full_evaluations=full_evaluations,
        stage_evaluations=stage_evaluations,
    )


def _replay_pruning(
    candidates: Sequence[tuple[SwitchState, ...]],
    evaluations: Sequence[SequenceEvaluation],
    n_steps: int,
) -> SearchResult:
    # walks the running costs in enumeration order exactly as search_pruned does
    best_index: int = -1
    J_opt: float = INF
    full_evaluations: int = 0
    stage_evaluations: int = 0
    for i, evaluation in enumerate(evaluations):
        J: float = 0.0
        completed: bool = True
        for j in range(n_steps):
            stage_evaluations += 1
            if j == evaluation.first_violation:
                completed = False
                break
            J = evaluation.running_costs[j]
            if J > J_opt:
                completed = False
                break
        if completed:
            full_evaluations += 1
            if J < J_opt:
                best_index, J_opt = i, J
    return _pruned_outcome(
        candidates, best_index, J_opt, full_evaluations, stage_evaluations, lambda: evaluations
    )


def search_parallel(
    s0: MotorState,
    ctrl_state: ControllerState,
    ref: ReferencePreview,
    cfg: ControllerConfig,
    model: PredictionModel,
    scheduler: str | None = None,
) -> SearchResult:
    """
    Candidates evaluated as dask tasks, then reduced in enumeration order by replaying
    the pruning on their running costs: the selected sequence and both evaluation
    counters are those search_pruned reports.

    :param str scheduler: dask scheduler, defaults to env variable DASK_SCHEDULER or
        'threads'.
    :rtype: SearchResult
    """
    candidates = candidate_sequences(cfg.Nu)
    tasks: list[dask.delayed.Delayed] = [
        dask.delayed(evaluate_sequence)(s0, ctrl_state, controls, ref, cfg, model)
        for controls in candidates
    ]
    evaluations = dask.compute(
        *tasks, scheduler=scheduler or os.getenv('DASK_SCHEDULER', 'threads')
    )
    return _replay_pruning(candidates, list(evaluations), cfg.N)


def search_pruned(
    s0: MotorState,
    ctrl_state: ControllerState,
    ref: ReferencePreview,
    cfg: ControllerConfig,
    model: PredictionModel,
) -> SearchResult:
    """
    Incremental enumeration with pruning: the running cost of a candidate is
    abandoned as soon as it exceeds the incumbent optimum, or becomes +inf on a
    constraint violation; the incumbent is replaced only by a strictly lower cost at
    the horizon end.

    :param ControllerState ctrl_state: state after this instant's error update.
    :rtype: SearchResult
    """
    candidates = candidate_sequences(cfg.Nu)
    last: int = cfg.Nu - 1
    best_index: int = -1
    J_opt: float = INF
    full_evaluations: int = 0
    stage_evaluations: int = 0

    for i, controls in enumerate(candidates):
        J: float = 0.0
        completed: bool = True
        for j, step in enumerate(iter_prediction(s0, ctrl_state.E, controls, ref, cfg, model)):
            stage_evaluations += 1
            if step.violated:
                completed = False
                break
            u_j, u_prev_j = _step_controls(controls, ctrl_state.u_prev, j, last)
            J += stage_cost(step.state.v, ref.w[j], step.E_hat, u_j, u_prev_j, cfg, j)
            if J > J_opt:
                completed = False
                break
        if completed:
            full_evaluations += 1
            if J < J_opt:
                best_index, J_opt = i, J

    return _pruned_outcome(
        candidates,
        best_index,
        J_opt,
        full_evaluations,
        stage_evaluations,
        lambda: [
            evaluate_sequence(s0, ctrl_state, controls, ref, cfg, model)
            for controls in candidates
        ],
    )


def update_error(
    ctrl_state: ControllerState, w_now: float, v_now: float, cfg: ControllerConfig
) -> ControllerState:
    """
    E' = E + K_gain/speed_scale * (w - v), clamped to [-E_sat, E_sat].

    :rtype: ControllerState
    """
    return ctrl_state._replace(
        E=_integrate_error(ctrl_state.E, w_now - v_now, cfg.K_gain / cfg.speed_scale, cfg.E_sat)
    )


def control_step(
    measured: MotorState,
    w_now: float,
    ref: ReferencePreview,
    ctrl_state: ControllerState,
    cfg: ControllerConfig,
    model: PredictionModel,
) -> tuple[SwitchState, ControllerState, StepDiagnostics]:
    """
    One receding-horizon step: update the accumulated error, search, apply the first
    control of the selected sequence and remember it.

    :param MotorState measured: measured currents and speed, estimated secondary flux.
    :param float w_now: speed reference at this instant.
    :param ReferencePreview ref: reference at the N prediction instants.
    :return: applied switch state, next controller state and diagnostics.
    :rtype: tuple[SwitchState, ControllerState, StepDiagnostics]
    """
    start: float = time.perf_counter()
    updated: ControllerState = update_error(ctrl_state, w_now, measured.v, cfg)
    search: Callable[..., SearchResult] = (
        search_parallel if cfg.parallel_candidates else search_pruned
    )
    result: SearchResult = search(measured, updated, ref, cfg, model)
    u: SwitchState = result.sequence.controls[0]
    elapsed: float = time.perf_counter() - start

    return (
        u,
        updated._replace(u_prev=u),
        StepDiagnostics(
            cost=result.cost,
            full_evaluations=result.full_evaluations,
            stage_evaluations=result.stage_evaluations,
            compute_time=elapsed,
            all_infeasible=result.all_infeasible,
            integral_state=updated.E,
        ),
    )


class EnmpcController:
    """
    ENMPC bound to one simulation instance.

    Attributes:
        config (ControllerConfig): tuning.
        model (PredictionModel): model-side motor and inverter.
        state (ControllerState): accumulated error and last applied control.
        infeasible_steps (int): steps where every candidate violated a constraint.
    """

    def __init__(
        self,
        config: ControllerConfig,
        model: PredictionModel,
        initial: ControllerState | None = None,
    ) -> None:
        """
        :param ControllerConfig config: tuning.
        :param PredictionModel model: model-side motor and inverter.
        :param ControllerState initial: starting state, E = 0 and (0,0,0) by default.
        """
        self.config: ControllerConfig = config
        self.model: PredictionModel = model
        self.state: ControllerState = initial if initial is not None else ControllerState()
        self.infeasible_steps: int = 0

    def step(self, inputs: ControllerInputs) -> tuple[SwitchState, StepDiagnostics]:
        """
        :param ControllerInputs inputs: signals of this sampling instant.
        :return: applied switch state and diagnostics.
        :rtype: tuple[SwitchState, StepDiagnostics]
        """
        u, self.state, diagnostics = control_step(
            inputs.measured,
            inputs.w_now,
            ReferencePreview(tuple(inputs.preview)),
            self.state,
            self.config,
            self.model,
        )
        if diagnostics.all_infeasible:
            self.infeasible_steps += 1
            if self.infeasible_steps == 1:
                logger.warning(
                    "All %d candidates violate the flux/current limits, applying the "
                    "least violating one (%s)",
                    8**self.config.Nu,
                    u,
                )
        return u, diagnostics
