# pylint: skip-file
"""
Test for module src.estimators.flux_estimator
"""

from dataclasses import replace

import numpy as np
import pytest

from src.estimators.flux_estimator import (
    EstimatorState,
    FluxEstimator,
    consistent_state,
    secondary_flux,
    update,
)
from src.motor.inverter import InverterParams, SWITCH_STATES, VoltageAlphaBeta, voltage
from src.motor.lim_model import (
    NOMINAL_MOTOR,
    MotorState,
    PlantInput,
    derive_params,
    euler_step,
    premagnetized_state,
)


@pytest.fixture
def params():
    return NOMINAL_MOTOR


@pytest.fixture
def derived(params):
    return derive_params(params)


def test_update_integrates_voltage_minus_drop():
    est = update(EstimatorState(0.1, -0.2), VoltageAlphaBeta(100.0, 50.0), 2.0, -1.0, 5.0, 1e-4)
    assert est.lam_as == pytest.approx(0.1 + 1e-4 * (100.0 - 10.0))
    assert est.lam_bs == pytest.approx(-0.2 + 1e-4 * (50.0 + 5.0))


@pytest.mark.parametrize('dt', [0.0, -1e-4])
def test_update_rejects_non_positive_dt(dt):
    with pytest.raises(ValueError):
        update(EstimatorState(), VoltageAlphaBeta(0.0, 0.0), 0.0, 0.0, 5.0, dt)


def test_zero_voltage_zero_current_keeps_estimate():
    est = EstimatorState(0.3, 0.1)
    assert update(est, VoltageAlphaBeta(0.0, 0.0), 0.0, 0.0, 5.3685, 1e-4) == est


def test_secondary_flux_of_consistent_state(params, derived):
    """
    Test that the estimate equals the plant flux when the integral is consistent.
    """
    state = MotorState(3.0, -1.5, 0.05, 0.02, 1.0)
    est = consistent_state(state, params, derived)
    estimate = secondary_flux(est, state.i_as, state.i_bs, params, derived)
    assert estimate.lam_ar_hat == pytest.approx(state.lam_ar, abs=1e-12)
    assert estimate.lam_br_hat == pytest.approx(state.lam_br, abs=1e-12)


def test_consistent_state_at_rest_is_zero(params, derived):
    assert consistent_state(MotorState(0.0, 0.0, 0.0, 0.0, 0.0), params, derived) == (0.0, 0.0)


def test_estimator_tracks_plant_with_exact_rs(params, derived):
    """
    Test that the forward-Euler plant and the rectangular integration agree step by
    step when the estimator uses the plant's Rs.
    """
    inverter = InverterParams(255.0)
    rng = np.random.default_rng(7)
    plant = premagnetized_state(params, 0.056)
    estimator = FluxEstimator(params, derived, consistent_state(plant, params, derived))
    for _ in range(500):
        u = SWITCH_STATES[rng.integers(len(SWITCH_STATES))]
        V = voltage(u, inverter)
        estimator.step(V, plant.i_as, plant.i_bs, 1e-4)
        plant = euler_step(plant, PlantInput(V.V_as, V.V_bs, 350.0), 1e-4, params, derived)

    estimate = estimator.estimate(plant.i_as, plant.i_bs)
    assert estimate.lam_ar_hat == pytest.approx(plant.lam_ar, abs=1e-6)
    assert estimate.lam_br_hat == pytest.approx(plant.lam_br, abs=1e-6)


def test_estimator_drifts_with_wrong_rs(params, derived):
    """
    Test that the estimator integrates its own Rs: with a 50 % error and a constant
    current the estimate moves away from the plant.
    """
    plant = premagnetized_state(params, 0.056)
    estimator = FluxEstimator(
        replace(params, Rs=1.5 * params.Rs), derived, consistent_state(plant, params, derived)
    )
    hold = VoltageAlphaBeta(params.Rs * plant.i_as, 0.0)
    for _ in range(1000):
        estimator.step(hold, plant.i_as, plant.i_bs, 1e-4)

    # plant stays at its equilibrium, the estimate loses 0.5*Rs*i_as*0.1 s of flux
    drift = 0.5 * params.Rs * plant.i_as * 0.1
    estimate = estimator.estimate(plant.i_as, plant.i_bs)
    assert estimator.state.lam_as == pytest.approx(params.Ls * plant.i_as - drift, rel=1e-9)
    assert estimate.lam_ar_hat < plant.lam_ar


def test_flux_estimator_defaults_to_zero_integral(params, derived):
    estimator = FluxEstimator(params, derived)
    assert estimator.state == EstimatorState(0.0, 0.0)
    assert estimator.estimate(0.0, 0.0) == (0.0, 0.0)
