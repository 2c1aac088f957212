"""
This module models the ideal two-level three-phase inverter driving the LIM.

The eight switch states are enumerated in a fixed canonical order (index 1..8), which
is also the order of the switch-transition table and the tie-break order of the
controllers. The switch-transition table is kept as a literal and checked against the
Hamming distance when the module is imported.

Classes:
    SwitchState -- Leg positions (u1, u2, u3), each 0 or 1.
    InverterParams -- DC link voltage.
    VoltageAlphaBeta -- Primary voltage in the alpha-beta frame.

Functions:
    - enumerate_states: The 8 switch states in canonical order.
    - state_index: Canonical 1-based index of a switch state.
    - voltage: Switch state to alpha-beta primary voltage.
    - switch_count: Number of leg transitions between two states.
    - phase_voltages: Leg (pole) voltages of a switch state.
    - inverse_clarke: Alpha-beta quantity to the three phase quantities.
"""

__all__ = [
    'SwitchState',
    'InverterParams',
    'VoltageAlphaBeta',
    'SWITCH_STATES',
    'SWITCH_COUNT_TABLE',
    'DEFAULT_VDC',
    'enumerate_states',
    'state_index',
    'voltage',
    'switch_count',
    'phase_voltages',
    'inverse_clarke',
]

from dataclasses import dataclass
import math
from typing import NamedTuple

SQRT3: float = math.sqrt(3.0)

# Rectified 180 V rated line voltage
DEFAULT_VDC: float = 255.0


class SwitchState(NamedTuple):
    """
    Positions of the three inverter legs; 1 connects the phase to +Vdc/2, 0 to -Vdc/2.
    """

    u1: int
    u2: int
    u3: int


class VoltageAlphaBeta(NamedTuple):
    """
    Primary voltage components [V].
    """

    V_as: float
    V_bs: float


@dataclass(frozen=True)
class InverterParams:
    """
    Attributes:
        Vdc (float): DC link voltage [V].
    """

    Vdc: float = DEFAULT_VDC

    def __post_init__(self) -> None:
        if not (math.isfinite(self.Vdc) and self.Vdc > 0):
            raise ValueError(f"InverterParams.Vdc must be positive, got {self.Vdc!r}")


SWITCH_STATES: tuple[SwitchState, ...] = (
    SwitchState(1, 0, 0),
    SwitchState(0, 1, 0),
    SwitchState(0, 0, 1),
    SwitchState(1, 1, 0),
    SwitchState(0, 1, 1),
    SwitchState(1, 0, 1),
    SwitchState(0, 0, 0),
    SwitchState(1, 1, 1),
)

_INDEX: dict[SwitchState, int] = {u: i + 1 for i, u in enumerate(SWITCH_STATES)}

# Row: previous state index, column: next state index (both in SWITCH_STATES order)
SWITCH_COUNT_TABLE: tuple[tuple[int, ...], ...] = (
    (0, 2, 2, 1, 3, 1, 1, 2),
    (2, 0, 2, 1, 1, 3, 1, 2),
    (2, 2, 0, 3, 1, 1, 1, 2),
    (1, 1, 3, 0, 2, 2, 2, 1),
    (3, 1, 1, 2, 0, 2, 2, 1),
    (1, 3, 1, 2, 2, 0, 2, 1),
    (1, 1, 1, 2, 2, 2, 0, 3),
    (2, 2, 2, 1, 1, 1, 3, 0),
)


def enumerate_states() -> list[SwitchState]:
    """
    :return: the 8 switch states in canonical order (index 1 first).
    :rtype: list[SwitchState]
    """
    return list(SWITCH_STATES)


def state_index(u: SwitchState) -> int:
    """
    :return: canonical 1-based index of u.
    :rtype: int
    :raises ValueError: if u is not one of the 8 switch states.
    """
    try:
        return _INDEX[SwitchState(*u)]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{u!r} is not a valid switch state") from exc


def voltage(u: SwitchState, inv: InverterParams) -> VoltageAlphaBeta:
    """
    Map a switch state to the alpha-beta primary voltage.

    :param SwitchState u: leg positions.
    :param InverterParams inv: DC link.
    :rtype: VoltageAlphaBeta
    """
    return VoltageAlphaBeta(
        V_as=inv.Vdc * (u[0] - 0.5 * u[1] - 0.5 * u[2]),
        V_bs=inv.Vdc * (SQRT3 / 2.0) * (u[2] - u[1]),
    )


def switch_count(prev: SwitchState, nxt: SwitchState) -> int:
    """
    Number of inverter legs changing position between two consecutive states.

    :rtype: int
    """
    return abs(prev[0] - nxt[0]) + abs(prev[1] - nxt[1]) + abs(prev[2] - nxt[2])


def phase_voltages(u: SwitchState, inv: InverterParams) -> tuple[float, float, float]:
    """
    Leg voltages with respect to the DC link midpoint: +Vdc/2 when on, -Vdc/2 when off.

    :rtype: tuple[float, float, float]
    """
    return tuple(inv.Vdc * (x - 0.5) for x in u)  # type: ignore[return-value]


def inverse_clarke(x_as: float, x_bs: float) -> tuple[float, float, float]:
    """
    Three phase components of an alpha-beta quantity, consistent with voltage():
    applying the alpha-beta map of voltage() to the result gives back (x_as, x_bs).

    :rtype: tuple[float, float, float]
    """
    return (
        2.0 / 3.0 * x_as,
        -x_as / 3.0 - x_bs / SQRT3,
        -x_as / 3.0 + x_bs / SQRT3,
    )


def _check_switch_count_table() -> None:
    for i, prev in enumerate(SWITCH_STATES):
        for j, nxt in enumerate(SWITCH_STATES):
            if SWITCH_COUNT_TABLE[i][j] != switch_count(prev, nxt):
                raise RuntimeError(
                    f"switch count table mismatch at ({i + 1}, {j + 1}): "
                    f"{SWITCH_COUNT_TABLE[i][j]} != {switch_count(prev, nxt)}"
                )


_check_switch_count_table()
