"""
This module estimates the secondary flux of the LIM from the primary voltages and
currents. The primary (stator) flux is obtained by open-loop rectangular integration of
V - Rs*i at the sampling period; the secondary flux follows algebraically from it.

There is no drift compensation: with an exact Rs and a consistent initial value the
integral matches the plant's primary flux, with a wrong Rs it drifts.

Classes:
    EstimatorState -- Integrated primary flux per axis.
    FluxEstimate -- Estimated secondary flux per axis.
    FluxEstimator -- Stateful wrapper used by the closed-loop harness.

Functions:
    - update: One rectangular integration step.
    - secondary_flux: Secondary flux from the integrated primary flux and currents.
    - consistent_state: Estimator state matching a plant state.
"""

__all__ = [
    'EstimatorState',
    'FluxEstimate',
    'FluxEstimator',
    'update',
    'secondary_flux',
    'consistent_state',
]

import logging
from typing import NamedTuple

from src.motor.inverter import VoltageAlphaBeta
from src.motor.lim_model import DerivedParams, MotorParams, MotorState, stator_flux
from utils.logging_utils import setup_module_logger

logger: logging.Logger = setup_module_logger(__name__)


class EstimatorState(NamedTuple):
    """
    Integrated primary flux [Wb].
    """

    lam_as: float = 0.0
    lam_bs: float = 0.0


class FluxEstimate(NamedTuple):
    """
    Estimated secondary flux [Wb].
    """

    lam_ar_hat: float
    lam_br_hat: float


def update(
    est: EstimatorState,
    V: VoltageAlphaBeta,
    i_as: float,
    i_bs: float,
    Rs: float,
    dt: float,
) -> EstimatorState:
    """
    Forward rectangular integration of V - Rs*i over dt.

    :param EstimatorState est: integral at the start of the period.
    :param VoltageAlphaBeta V: primary voltage applied over the period.
    :param float i_as: alpha primary current at the start of the period [A].
    :param float i_bs: beta primary current at the start of the period [A].
    :param float Rs: primary resistance assumed by the estimator [ohm].
    :param float dt: integration period [s], positive.
    :rtype: EstimatorState
    """
    if not dt > 0.0:
        raise ValueError(f"integration period must be positive, got {dt}")
    return EstimatorState(
        lam_as=est.lam_as + dt * (V.V_as - i_as * Rs),
        lam_bs=est.lam_bs + dt * (V.V_bs - i_bs * Rs),
    )


def secondary_flux(
    est: EstimatorState, i_as: float, i_bs: float, p: MotorParams, d: DerivedParams
) -> FluxEstimate:
    """
    Secondary flux (Lr/Lm)*(lam_s - sigma*Ls*i), per axis.

    :rtype: FluxEstimate
    """
    ratio: float = p.Lr / p.Lm
    sigma_ls: float = d.sigma * p.Ls
    return FluxEstimate(
        lam_ar_hat=ratio * (est.lam_as - sigma_ls * i_as),
        lam_br_hat=ratio * (est.lam_bs - sigma_ls * i_bs),
    )


def consistent_state(s: MotorState, p: MotorParams, d: DerivedParams) -> EstimatorState:
    """
    Estimator state equal to the primary flux of a plant state (zero at a
    de-energized standstill).

    :rtype: EstimatorState
    """
    return EstimatorState(*stator_flux(s, p, d))


class FluxEstimator:
    """
    Sequential flux estimator owned by one simulation instance.

    Attributes:
        params (MotorParams): model-side motor constants (Rs and inductances).
        derived (DerivedParams): constants derived from params.
        state (EstimatorState): current primary flux integral.
    """

    def __init__(
        self,
        params: MotorParams,
        derived: DerivedParams,
        initial: EstimatorState | None = None,
    ) -> None:
        """
        :param MotorParams params: model-side motor constants.
        :param DerivedParams derived: derive_params(params).
        :param EstimatorState initial: starting integral, zero by default.
        """
        self.params: MotorParams = params
        self.derived: DerivedParams = derived
        self.state: EstimatorState = initial if initial is not None else EstimatorState()
        logger.debug("Flux estimator initialized at %s", self.state)

    def estimate(self, i_as: float, i_bs: float) -> FluxEstimate:
        """
        :return: secondary flux estimate for the current integral and currents.
        :rtype: FluxEstimate
        """
        return secondary_flux(self.state, i_as, i_bs, self.params, self.derived)

    def step(self, V: VoltageAlphaBeta, i_as: float, i_bs: float, dt: float) -> EstimatorState:
        """
        Integrate one sampling period and keep the result.

        :rtype: EstimatorState
        """
        self.state = update(self.state, V, i_as, i_bs, self.params.Rs, dt)
        return self.state
