"""
Shared types of the switch-level speed controllers.

Classes:
    ControllerInputs -- Signals available to a controller at one sampling instant.
    StepDiagnostics -- Per-step figures reported to the trace.
    SwitchController -- Protocol implemented by EnmpcController and DtcController.
"""

__all__ = ['ControllerInputs', 'StepDiagnostics', 'SwitchController']

from dataclasses import dataclass
from typing import Protocol

from src.motor.inverter import SwitchState
from src.motor.lim_model import MotorState


@dataclass(frozen=True)
class ControllerInputs:
    """
    Attributes:
        measured (MotorState): measured currents and speed with the ESTIMATED
            secondary flux in the flux slots.
        stator_flux (tuple[float, float]): estimated primary flux (alpha, beta) [Wb].
        force_estimate (float): thrust computed from the estimated flux [N].
        w_now (float): speed reference at this instant [m/s].
        preview (tuple[float, ...]): speed reference at the future prediction instants.
    """

    measured: MotorState
    stator_flux: tuple[float, float]
    force_estimate: float
    w_now: float
    preview: tuple[float, ...]


@dataclass(frozen=True)
class StepDiagnostics:
    """
    Attributes:
        cost (float): optimal cost of the step (0 for controllers without a cost).
        full_evaluations (int): candidate sequences evaluated over the whole horizon.
        stage_evaluations (int): stage costs computed during the search.
        compute_time (float): wall time of the controller step [s].
        all_infeasible (bool): every candidate violated a constraint.
        integral_state (float): accumulated error of the controller (E or PI integral).
    """

    cost: float = 0.0
    full_evaluations: int = 0
    stage_evaluations: int = 0
    compute_time: float = 0.0
    all_infeasible: bool = False
    integral_state: float = 0.0


class SwitchController(Protocol):
    """
    A controller emitting one inverter switch state per sampling period.
    """

    def step(self, inputs: ControllerInputs) -> tuple[SwitchState, StepDiagnostics]:
        """
        Compute the switch state applied over the next sampling period.
        """
        ...  # pylint: disable=unnecessary-ellipsis
