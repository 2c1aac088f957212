"""
This module contains the classical direct torque (thrust) control baseline.

A PI speed loop produces the force reference; a two-level hysteresis comparator on
the primary flux magnitude and a three-level hysteresis comparator on the force
select, together with the 60-degree sector of the primary flux, one entry of the
Takahashi-Noguchi switching table. The zero-force entries use the zero vector that
needs the fewest leg transitions from the previous state.

Classes:
    DtcConfig -- PI gains, flux reference and hysteresis bands.
    DtcState -- PI integral, comparator outputs and previous switch state.
    DtcController -- Stateful controller used by the closed-loop harness.

Functions:
    - default_dtc_config: Gains from pole placement on the mechanical model.
    - sector: 60-degree sector (1..6) of a flux vector.
    - flux_hysteresis, force_hysteresis: comparator updates.
    - select_vector: Switching-table lookup.
    - dtc_step: One control step.
"""

__all__ = [
    'DtcConfig',
    'DtcState',
    'DtcController',
    'ACTIVE_VECTORS',
    'SWITCHING_TABLE',
    'default_dtc_config',
    'sector',
    'flux_hysteresis',
    'force_hysteresis',
    'select_vector',
    'dtc_step',
]

from dataclasses import dataclass
import logging
import math
import time
from typing import NamedTuple

from src.controllers.base import ControllerInputs, StepDiagnostics
from src.motor.inverter import InverterParams, SwitchState, switch_count, voltage
from src.motor.lim_model import DerivedParams, MotorParams, derive_params
from utils.logging_utils import setup_module_logger

logger: logging.Logger = setup_module_logger(__name__)

ZERO_LOW: SwitchState = SwitchState(0, 0, 0)
ZERO_HIGH: SwitchState = SwitchState(1, 1, 1)

# Active vectors at 0, 60, ..., 300 degrees
ACTIVE_VECTORS: tuple[SwitchState, ...] = (
    SwitchState(1, 0, 0),
    SwitchState(1, 0, 1),
    SwitchState(0, 0, 1),
    SwitchState(0, 1, 1),
    SwitchState(0, 1, 0),
    SwitchState(1, 1, 0),
)

# (flux comparator, force comparator) -> vector for sectors 1..6; None = zero vector
SWITCHING_TABLE: dict[tuple[int, int], tuple[SwitchState | None, ...]] = {
    (1, 1): (
        SwitchState(1, 0, 1),
        SwitchState(0, 0, 1),
        SwitchState(0, 1, 1),
        SwitchState(0, 1, 0),
        SwitchState(1, 1, 0),
        SwitchState(1, 0, 0),
    ),
    (1, 0): (None,) * 6,
    (1, -1): (
        SwitchState(1, 1, 0),
        SwitchState(1, 0, 0),
        SwitchState(1, 0, 1),
        SwitchState(0, 0, 1),
        SwitchState(0, 1, 1),
        SwitchState(0, 1, 0),
    ),
    (0, 1): (
        SwitchState(0, 0, 1),
        SwitchState(0, 1, 1),
        SwitchState(0, 1, 0),
        SwitchState(1, 1, 0),
        SwitchState(1, 0, 0),
        SwitchState(1, 0, 1),
    ),
    (0, 0): (None,) * 6,
    (0, -1): (
        SwitchState(0, 1, 0),
        SwitchState(1, 1, 0),
        SwitchState(1, 0, 0),
        SwitchState(1, 0, 1),
        SwitchState(0, 0, 1),
        SwitchState(0, 1, 1),
    ),
}


@dataclass(frozen=True)
class DtcConfig:
    """
    Attributes:
        Kp (float): proportional gain [N/(m/s)].
        Ki (float): integral gain [N/m].
        flux_ref (float): primary flux magnitude reference [Wb].
        flux_band (float): flux hysteresis half-width [Wb].
        force_band (float): force hysteresis half-width [N].
        force_limit (float): clamp of the PI force reference [N].
    """

    Kp: float
    Ki: float
    flux_ref: float
    flux_band: float
    force_band: float
    force_limit: float

    def __post_init__(self) -> None:
        for name in ('Kp', 'Ki'):
            if not getattr(self, name) >= 0.0:
                raise ValueError(f"DtcConfig.{name} must be >= 0")
        for name in ('flux_ref', 'flux_band', 'force_band', 'force_limit'):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"DtcConfig.{name} must be > 0")


class DtcState(NamedTuple):
    """
    Attributes:
        pi_integral (float): integral of the speed error [m].
        flux_comparator (int): 1 = increase flux, 0 = decrease flux.
        force_comparator (int): +1 increase, 0 hold (zero vector), -1 decrease.
        u_prev (SwitchState): last applied switch state.
    """

    pi_integral: float = 0.0
    flux_comparator: int = 1
    force_comparator: int = 0
    u_prev: SwitchState = ZERO_LOW


def default_dtc_config(
    p: MotorParams,
    d: DerivedParams | None = None,
    bandwidth: float = 60.0,
    flux_ref: float = 0.16,
    force_limit: float = 1300.0,
) -> DtcConfig:
    """
    PI gains placing a double pole at -bandwidth on M*s^2 + (D + Kp)*s + Ki; bands at
    2 % of flux_ref and 5 % of the nominal force kf*Irated*flux_rated.

    The 0.16 Wb flux reference keeps the voltage needed at 2 m/s under full load
    within what the DC link delivers; above about 0.3 Wb the drive cannot reach that
    speed and the force loop chatters.

    :param MotorParams p: motor constants.
    :param DerivedParams d: derive_params(p), computed when omitted.
    :param float bandwidth: closed-loop pole magnitude [rad/s].
    :rtype: DtcConfig
    """
    d = d or derive_params(p)
    nominal_force: float = d.kf * p.Irated * p.flux_rated
    return DtcConfig(
        Kp=max(2.0 * bandwidth * p.M - p.D, 0.0),
        Ki=p.M * bandwidth**2,
        flux_ref=flux_ref,
        flux_band=0.02 * flux_ref,
        force_band=0.05 * nominal_force,
        force_limit=force_limit,
    )


def sector(lam_as: float, lam_bs: float) -> int:
    """
    Sector k in 1..6 covers (-30 + 60*(k-1), 30 + 60*(k-1)] degrees; a boundary angle
    belongs to the sector ending there. A zero vector is in sector 1.

    :rtype: int
    """
    if lam_as == 0.0 and lam_bs == 0.0:
        return 1
    shifted: float = (math.degrees(math.atan2(lam_bs, lam_as)) + 30.0) % 360.0
    k: int = math.ceil(shifted / 60.0)
    return 6 if k == 0 else k


def flux_hysteresis(previous: int, flux_ref: float, flux: float, band: float) -> int:
    """
    Two-level comparator: 1 below flux_ref - band, 0 above flux_ref + band, else hold.

    :rtype: int
    """
    error: float = flux_ref - flux
    if error > band:
        return 1
    if error < -band:
        return 0
    return previous


def force_hysteresis(previous: int, force_ref: float, force: float, band: float) -> int:
    """
    Three-level comparator: +1 / -1 once the error leaves +-band, back to 0 when the
    error crosses zero, otherwise hold.

    :rtype: int
    """
    error: float = force_ref - force
    if error > band:
        return 1
    if error < -band:
        return -1
    if (previous == 1 and error <= 0.0) or (previous == -1 and error >= 0.0):
        return 0
    return previous


def select_vector(
    flux_comparator: int, force_comparator: int, sector_index: int, u_prev: SwitchState
) -> SwitchState:
    """
    Switching-table lookup; zero entries pick (0,0,0) or (1,1,1), whichever is
    fewer transitions away from u_prev.

    :rtype: SwitchState
    """
    entry: SwitchState | None = SWITCHING_TABLE[(flux_comparator, force_comparator)][
        sector_index - 1
    ]
    if entry is not None:
        return entry
    if switch_count(u_prev, ZERO_HIGH) < switch_count(u_prev, ZERO_LOW):
        return ZERO_HIGH
    return ZERO_LOW


def dtc_step(
    v: float,
    stator_flux: tuple[float, float],
    force_estimate: float,
    w_now: float,
    state: DtcState,
    cfg: DtcConfig,
    dt: float,
) -> tuple[SwitchState, DtcState]:
    """
    One DTC step.

    :param float v: measured speed [m/s].
    :param tuple stator_flux: estimated primary flux (alpha, beta) [Wb].
    :param float force_estimate: estimated thrust [N].
    :param float w_now: speed reference [m/s].
    :param DtcState state: state from the previous step.
    :param DtcConfig cfg: tuning.
    :param float dt: sampling period [s].
    :return: switch state to apply and the next DTC state.
    :rtype: tuple[SwitchState, DtcState]
    """
    error: float = w_now - v
    integral: float = state.pi_integral + error * dt
    force_ref: float = cfg.Kp * error + cfg.Ki * integral
    if abs(force_ref) > cfg.force_limit:
        # clamping anti-windup: stop integrating while saturated
        force_ref = math.copysign(cfg.force_limit, force_ref)
        integral = state.pi_integral

    flux_cmp: int = flux_hysteresis(
        state.flux_comparator, cfg.flux_ref, math.hypot(*stator_flux), cfg.flux_band
    )
    force_cmp: int = force_hysteresis(
        state.force_comparator, force_ref, force_estimate, cfg.force_band
    )
    u: SwitchState = select_vector(flux_cmp, force_cmp, sector(*stator_flux), state.u_prev)
    return u, DtcState(integral, flux_cmp, force_cmp, u)


class DtcController:
    """
    DTC bound to one simulation instance.

    Attributes:
        config (DtcConfig): tuning.
        Ts (float): sampling period [s].
        state (DtcState): PI integral, comparators and previous switch state.
    """

    def __init__(self, config: DtcConfig, Ts: float, initial: DtcState | None = None) -> None:
        """
        :param DtcConfig config: tuning.
        :param float Ts: sampling period [s].
        :param DtcState initial: starting state.
        """
        self.config: DtcConfig = config
        self.Ts: float = Ts
        self.state: DtcState = initial if initial is not None else DtcState()

    def step(self, inputs: ControllerInputs) -> tuple[SwitchState, StepDiagnostics]:
        """
        :param ControllerInputs inputs: signals of this sampling instant.
        :rtype: tuple[SwitchState, StepDiagnostics]
        """
        start: float = time.perf_counter()
        u, self.state = dtc_step(
            inputs.measured.v,
            inputs.stator_flux,
            inputs.force_estimate,
            inputs.w_now,
            self.state,
            self.config,
            self.Ts,
        )
        return u, StepDiagnostics(
            compute_time=time.perf_counter() - start, integral_state=self.state.pi_integral
        )


def _vector_angle(u: SwitchState) -> float:
    V = voltage(u, InverterParams(1.0))
    return math.degrees(math.atan2(V.V_bs, V.V_as)) % 360.0


def _check_switching_table() -> None:
    for key, row in SWITCHING_TABLE.items():
        for k in range(6):
            here, there = row[k], row[(k + 1) % 6]
            if (here is None) != (there is None):
                raise RuntimeError(f"switching table row {key} mixes zero and active entries")
            if here is None or there is None:
                continue
            step: float = (_vector_angle(there) - _vector_angle(here)) % 360.0
            if abs(step - 60.0) > 1e-6:
                raise RuntimeError(
                    f"switching table row {key} is not 60-degree symmetric at sector {k + 1}"
                )


_check_switching_table()
