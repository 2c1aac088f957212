"""
This module contains the continuous-time model of the linear induction motor (LIM)
in the stationary alpha-beta frame, its derived constants and the fixed-step
forward-Euler discretization used both as the simulated plant and as the
prediction model of the controllers.

All values are SI (ohm, henry, weber, ampere, volt, meter, second, kilogram, newton).

Classes:
    MotorParams -- Electrical and mechanical constants of the motor.
    DerivedParams -- Leakage coefficient, secondary time constant and force constant.
    MotorState -- The 5-dimensional continuous state (also used for its rate).
    PlantInput -- Primary voltages and external load force.
    NonFiniteStateError -- Raised when a step produces NaN or Inf.

Functions:
    - derive_params: Computes sigma, Tr and kf from MotorParams.
    - electromagnetic_force: Thrust developed by the motor.
    - derivative: Right-hand side of the state equations.
    - euler_step: One explicit forward-Euler step.
    - simulate_fine: Sub-stepped forward Euler with the input held.
    - premagnetized_state: DC equilibrium at standstill for a given secondary flux.
    - stator_flux: Primary flux linkage of a state.

Dependencies:
    - math
    - dataclasses
"""

__all__ = [
    'MotorParams',
    'DerivedParams',
    'MotorState',
    'PlantInput',
    'NonFiniteStateError',
    'NOMINAL_MOTOR',
    'derive_params',
    'electromagnetic_force',
    'derivative',
    'euler_step',
    'simulate_fine',
    'premagnetized_state',
    'stator_flux',
]

from dataclasses import dataclass, fields
import math
from typing import NamedTuple


class NonFiniteStateError(RuntimeError):
    """
    Raised when an integration step yields a non-finite state component.
    """


@dataclass(frozen=True)
class MotorParams:
    """
    Electrical and mechanical constants of the LIM.

    Attributes:
        Rs (float): primary winding resistance per phase [ohm].
        Rr (float): secondary resistance per phase [ohm].
        Ls (float): primary inductance per phase [H].
        Lr (float): secondary inductance per phase [H].
        Lm (float): magnetizing inductance per phase [H].
        np (int): number of pole pairs.
        h (float): pole pitch [m].
        M (float): total mass of the mover [kg].
        D (float): viscous friction and iron-loss coefficient [kg/s].
        Vrated (float): rated line voltage [V].
        Irated (float): rated current [A].
        flux_rated (float): rated secondary flux [Wb].
    """

    Rs: float
    Rr: float
    Ls: float
    Lr: float
    Lm: float
    np: int
    h: float
    M: float
    D: float
    Vrated: float
    Irated: float
    flux_rated: float

    def __post_init__(self) -> None:
        for field in fields(self):
            value = getattr(self, field.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"MotorParams.{field.name} must be positive, got {value!r}")
        if self.Lm**2 >= self.Ls * self.Lr:
            raise ValueError("MotorParams requires Lm**2 < Ls*Lr (leakage coefficient in (0,1))")

    @property
    def mechanical_time_constant(self) -> float:
        """
        :return: M/D [s]
        :rtype: float
        """
        return self.M / self.D


# 3-phase, Y-connected, 8-pole (np = 4), 3 kW, 60 Hz, 180 V, 14.2 A
NOMINAL_MOTOR: MotorParams = MotorParams(
    Rs=5.3685,
    Rr=3.5315,
    Ls=0.02846,
    Lr=0.02846,
    Lm=0.02419,
    np=4,
    h=0.027,
    M=2.78,
    D=36.0455,
    Vrated=180.0,
    Irated=14.2,
    flux_rated=0.056,
)


@dataclass(frozen=True)
class DerivedParams:
    """
    Constants derived from MotorParams.

    Attributes:
        sigma (float): leakage coefficient 1 - Lm^2/(Ls*Lr), in (0, 1).
        Tr (float): secondary time constant Lr/Rr [s].
        kf (float): force constant 3*np*Lm*pi/(2*Lr*h) [N/(Wb*A)].
    """

    sigma: float
    Tr: float
    kf: float


class MotorState(NamedTuple):
    """
    Continuous state of the LIM. Rates returned by derivative() use the same layout.
    """

    i_as: float
    i_bs: float
    lam_ar: float
    lam_br: float
    v: float


class PlantInput(NamedTuple):
    """
    Inputs of the LIM: primary voltages [V] and external load force [N].
    """

    V_as: float
    V_bs: float
    F_L: float = 0.0


def derive_params(p: MotorParams) -> DerivedParams:
    """
    Compute the leakage coefficient, the secondary time constant and the force constant.

    :param MotorParams p: motor constants; validated on construction.
    :return: the derived constants.
    :rtype: DerivedParams
    :raises ValueError: if the parameters do not give sigma in (0, 1).
    """
    if not isinstance(p, MotorParams):
        raise ValueError("derive_params expects a MotorParams instance")
    sigma: float = 1.0 - p.Lm**2 / (p.Ls * p.Lr)
    if not 0.0 < sigma < 1.0:
        raise ValueError(f"leakage coefficient {sigma} outside (0, 1)")
    return DerivedParams(
        sigma=sigma,
        Tr=p.Lr / p.Rr,
        kf=3.0 * p.np * p.Lm * math.pi / (2.0 * p.Lr * p.h),
    )


def electromagnetic_force(s: MotorState, d: DerivedParams) -> float:
    """
    :return: kf*(lam_ar*i_bs - lam_br*i_as) [N]
    :rtype: float
    """
    return d.kf * (s.lam_ar * s.i_bs - s.lam_br * s.i_as)


def derivative(s: MotorState, inp: PlantInput, p: MotorParams, d: DerivedParams) -> MotorState:
    """
    Right-hand side of the LIM state equations in the alpha-beta frame.

    :param MotorState s: current state.
    :param PlantInput inp: primary voltages and load force.
    :param MotorParams p: motor constants.
    :param DerivedParams d: constants from derive_params(p).
    :return: time derivative of every state component.
    :rtype: MotorState
    """
    sigma_ls: float = d.sigma * p.Ls
    current_decay: float = p.Rs / sigma_ls + (1.0 - d.sigma) / (d.sigma * d.Tr)
    flux_coupling: float = p.Lm / (sigma_ls * p.Lr * d.Tr)
    speed_coupling: float = p.np * p.Lm * math.pi / (sigma_ls * p.Lr * p.h)
    # electrical angular speed of the secondary
    omega: float = p.np * math.pi / p.h * s.v

    return MotorState(
        i_as=-current_decay * s.i_as
        + flux_coupling * s.lam_ar
        + speed_coupling * s.v * s.lam_br
        + inp.V_as / sigma_ls,
        i_bs=-current_decay * s.i_bs
        - speed_coupling * s.v * s.lam_ar
        + flux_coupling * s.lam_br
        + inp.V_bs / sigma_ls,
        lam_ar=p.Lm / d.Tr * s.i_as - s.lam_ar / d.Tr - omega * s.lam_br,
        lam_br=p.Lm / d.Tr * s.i_bs + omega * s.lam_ar - s.lam_br / d.Tr,
        v=(electromagnetic_force(s, d) - p.D * s.v - inp.F_L) / p.M,
    )


def euler_step(
    s: MotorState, inp: PlantInput, dt: float, p: MotorParams, d: DerivedParams
) -> MotorState:
    """
    One explicit forward-Euler step: s + dt*derivative(s, inp).

    :param float dt: step size [s], must be positive.
    :return: the next state.
    :rtype: MotorState
    :raises ValueError: if dt is not positive.
    :raises NonFiniteStateError: if any component of the next state is NaN or Inf.
    """
    if not dt > 0.0:
        raise ValueError(f"step size must be positive, got {dt}")
    rate: MotorState = derivative(s, inp, p, d)
    nxt: MotorState = MotorState(
        s.i_as + dt * rate.i_as,
        s.i_bs + dt * rate.i_bs,
        s.lam_ar + dt * rate.lam_ar,
        s.lam_br + dt * rate.lam_br,
        s.v + dt * rate.v,
    )
    if not all(math.isfinite(x) for x in nxt):
        raise NonFiniteStateError(
            f"non-finite state after Euler step of {dt} s: {nxt} (from {s}, input {inp})"
        )
    return nxt


def simulate_fine(
    s: MotorState,
    inp: PlantInput,
    dt: float,
    substeps: int,
    p: MotorParams,
    d: DerivedParams,
) -> MotorState:
    """
    Cover dt with `substeps` Euler steps of dt/substeps, input held constant.

    :param int substeps: number of sub-steps, at least 1.
    :return: the state after dt.
    :rtype: MotorState
    """
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    h: float = dt / substeps
    for _ in range(substeps):
        s = euler_step(s, inp, h, p, d)
    return s


def premagnetized_state(p: MotorParams, flux: float | None = None) -> MotorState:
    """
    Standstill DC equilibrium with the secondary flux aligned with the alpha axis.

    Holding it requires V_as = Rs*i_as; with zero voltage the flux decays with Tr.

    :param MotorParams p: motor constants.
    :param float flux: secondary flux [Wb], defaults to p.flux_rated.
    :rtype: MotorState
    """
    flux = p.flux_rated if flux is None else flux
    return MotorState(i_as=flux / p.Lm, i_bs=0.0, lam_ar=flux, lam_br=0.0, v=0.0)


def stator_flux(s: MotorState, p: MotorParams, d: DerivedParams) -> tuple[float, float]:
    """
    Primary flux linkage sigma*Ls*i + (Lm/Lr)*lam_r of a state, per axis [Wb].

    :rtype: tuple[float, float]
    """
    sigma_ls: float = d.sigma * p.Ls
    ratio: float = p.Lm / p.Lr
    return (sigma_ls * s.i_as + ratio * s.lam_ar, sigma_ls * s.i_bs + ratio * s.lam_br)
