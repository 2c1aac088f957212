# pylint: skip-file
"""
Test for module src.motor.lim_model
"""

from dataclasses import replace
import math

import numpy as np
import pytest

from src.motor.lim_model import (
    NOMINAL_MOTOR,
    MotorState,
    NonFiniteStateError,
    PlantInput,
    derivative,
    derive_params,
    electromagnetic_force,
    euler_step,
    premagnetized_state,
    simulate_fine,
    stator_flux,
)


@pytest.fixture
def params():
    return NOMINAL_MOTOR


@pytest.fixture
def derived(params):
    return derive_params(params)


@pytest.fixture
def running_state():
    """A premagnetized state with some beta current and speed."""
    return MotorState(i_as=2.315, i_bs=3.0, lam_ar=0.056, lam_br=0.0, v=0.5)


def test_derive_params_force_constant(derived):
    """
    Test that the force constant of the test motor is about 592 N/(Wb*A).
    """
    assert derived.kf == pytest.approx(593.39, rel=1e-4)
    assert derived.kf == pytest.approx(592.0, rel=3e-3)


def test_derive_params_sigma_and_tr(derived):
    assert derived.sigma == pytest.approx(1.0 - 0.02419**2 / 0.02846**2)
    assert 0.0 < derived.sigma < 1.0
    assert derived.Tr == pytest.approx(0.02846 / 3.5315)


def test_mechanical_time_constant(params):
    assert params.mechanical_time_constant == pytest.approx(0.077, rel=5e-3)


@pytest.mark.parametrize('field', ['Rs', 'Lm', 'M', 'h'])
@pytest.mark.parametrize('value', [0.0, -1.0, math.nan, math.inf])
def test_motor_params_reject_non_positive(params, field, value):
    with pytest.raises(ValueError, match=field):
        replace(params, **{field: value})


def test_motor_params_reject_coupling_above_one(params):
    """
    Test that Lm**2 >= Ls*Lr (sigma <= 0) is rejected.
    """
    with pytest.raises(ValueError, match="Lm"):
        replace(params, Lm=0.03)


def test_derive_params_rejects_other_types():
    with pytest.raises(ValueError):
        derive_params({'Rs': 1.0})


def test_derivative_at_rest_is_zero(params, derived):
    state = MotorState(0.0, 0.0, 0.0, 0.0, 0.0)
    assert derivative(state, PlantInput(0.0, 0.0, 0.0), params, derived) == MotorState(
        0.0, 0.0, 0.0, 0.0, 0.0
    )


def test_premagnetized_state_is_flux_equilibrium(params, derived):
    """
    Test that the premagnetized standstill holds its flux under V_as = Rs*i_as.
    """
    state = premagnetized_state(params, 0.056)
    assert state.i_as == pytest.approx(0.056 / params.Lm)
    rate = derivative(state, PlantInput(params.Rs * state.i_as, 0.0, 0.0), params, derived)
    np.testing.assert_allclose(rate, np.zeros(5), atol=1e-9)


def test_premagnetized_state_defaults_to_rated_flux(params):
    assert premagnetized_state(params).lam_ar == params.flux_rated


def test_electromagnetic_force_collinear_is_zero(derived):
    """
    Test that current and flux along the same axis produce no thrust.
    """
    assert electromagnetic_force(MotorState(2.0, 0.0, 0.05, 0.0, 0.0), derived) == 0.0


def test_electromagnetic_force_value(derived, running_state):
    expected = derived.kf * (0.056 * 3.0 - 0.0 * 2.315)
    assert electromagnetic_force(running_state, derived) == pytest.approx(expected)


def test_load_decelerates(params, derived):
    rest = MotorState(0.0, 0.0, 0.0, 0.0, 0.0)
    rate = derivative(rest, PlantInput(0.0, 0.0, 350.0), params, derived)
    assert rate.v == pytest.approx(-350.0 / params.M)


def _rotate(x, y, theta):
    return x * math.cos(theta) - y * math.sin(theta), x * math.sin(theta) + y * math.cos(theta)


def test_derivative_superposes_inputs(params, derived, running_state):
    """
    Test that the input enters linearly: f(s, a + b) - f(s, 0) = (f(s, a) - f(s, 0)) +
    (f(s, b) - f(s, 0)).
    """
    a = PlantInput(127.5, -73.6, 120.0)
    b = PlantInput(-42.0, 110.4, 230.0)
    both = PlantInput(a.V_as + b.V_as, a.V_bs + b.V_bs, a.F_L + b.F_L)

    def rate(inp):
        return np.asarray(derivative(running_state, inp, params, derived))

    free = rate(PlantInput(0.0, 0.0, 0.0))
    np.testing.assert_allclose(
        rate(both) - free, (rate(a) - free) + (rate(b) - free), rtol=1e-9, atol=1e-9
    )


def test_derivative_input_terms(params, derived, running_state):
    """
    Test that V_as only drives i_as (by 1/(sigma*Ls)) and F_L only drives v (by -1/M).
    """
    free = np.asarray(derivative(running_state, PlantInput(0.0, 0.0, 0.0), params, derived))
    driven = np.asarray(derivative(running_state, PlantInput(100.0, 0.0, 50.0), params, derived))
    expected = np.array([100.0 / (derived.sigma * params.Ls), 0.0, 0.0, 0.0, -50.0 / params.M])
    np.testing.assert_allclose(driven - free, expected, rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize('theta', [0.3, math.pi / 2.0, 2.5, -1.1])
def test_derivative_is_rotation_covariant(params, derived, running_state, theta):
    """
    Test that rotating currents, flux and voltage by theta rotates the electrical
    derivatives by theta and leaves force and acceleration unchanged.
    """
    s = running_state
    inp = PlantInput(12.4, 30.0, 100.0)
    i_as, i_bs = _rotate(s.i_as, s.i_bs, theta)
    lam_ar, lam_br = _rotate(s.lam_ar, s.lam_br, theta)
    V_as, V_bs = _rotate(inp.V_as, inp.V_bs, theta)
    rotated = MotorState(i_as, i_bs, lam_ar, lam_br, s.v)

    rate = derivative(s, inp, params, derived)
    rotated_rate = derivative(rotated, PlantInput(V_as, V_bs, inp.F_L), params, derived)

    np.testing.assert_allclose(
        (rotated_rate.i_as, rotated_rate.i_bs),
        _rotate(rate.i_as, rate.i_bs, theta),
        rtol=1e-9,
        atol=1e-6,
    )
    np.testing.assert_allclose(
        (rotated_rate.lam_ar, rotated_rate.lam_br),
        _rotate(rate.lam_ar, rate.lam_br, theta),
        rtol=1e-9,
        atol=1e-12,
    )
    assert rotated_rate.v == pytest.approx(rate.v, rel=1e-9)
    assert electromagnetic_force(rotated, derived) == pytest.approx(
        electromagnetic_force(s, derived), rel=1e-9
    )


def test_flux_norm_decays_without_excitation(params, derived):
    """
    Test that with zero voltage at standstill and dt < Tr the secondary flux magnitude
    never grows from one step to the next and dies out.
    """
    dt = 1e-4
    assert dt < derived.Tr
    lam_ar, lam_br = _rotate(0.056, 0.0, math.pi / 6.0)
    state = MotorState(lam_ar / params.Lm, lam_br / params.Lm, lam_ar, lam_br, 0.0)
    norms = [math.hypot(state.lam_ar, state.lam_br)]
    for _ in range(2000):
        state = euler_step(state, PlantInput(0.0, 0.0, 0.0), dt, params, derived)
        norms.append(math.hypot(state.lam_ar, state.lam_br))

    assert np.all(np.diff(norms) <= 1e-15)
    assert norms[-1] < 1e-6
    assert abs(state.v) < 1e-12


def test_one_step_from_rest_under_full_voltage(params, derived):
    """
    Test that one step from rest with V_as = Vdc only moves i_as, by dt*Vdc/(sigma*Ls).
    """
    dt, Vdc = 1e-4, 255.0
    rest = MotorState(0.0, 0.0, 0.0, 0.0, 0.0)
    nxt = euler_step(rest, PlantInput(Vdc, 0.0, 0.0), dt, params, derived)
    assert nxt.i_as == pytest.approx(dt * Vdc / (derived.sigma * params.Ls), rel=1e-12)
    assert nxt.i_as == pytest.approx(3.2281, rel=1e-4)
    assert nxt[1:] == (0.0, 0.0, 0.0, 0.0)


def test_euler_step_is_state_plus_dt_times_derivative(params, derived, running_state):
    inp = PlantInput(12.4, 30.0, 100.0)
    dt = 1e-4
    rate = derivative(running_state, inp, params, derived)
    nxt = euler_step(running_state, inp, dt, params, derived)
    np.testing.assert_allclose(nxt, np.asarray(running_state) + dt * np.asarray(rate), rtol=1e-15)


def test_euler_step_tracks_fine_integration(params, derived, running_state):
    """
    Test that one step of Ts stays close to a 100-substep reference over the same span.
    """
    inp = PlantInput(12.4, 30.0, 0.0)
    coarse = euler_step(running_state, inp, 1e-4, params, derived)
    fine = simulate_fine(running_state, inp, 1e-4, 100, params, derived)
    np.testing.assert_allclose(coarse, fine, rtol=0.02)


@pytest.mark.parametrize('dt', [0.0, -1e-4])
def test_euler_step_rejects_non_positive_dt(params, derived, running_state, dt):
    with pytest.raises(ValueError):
        euler_step(running_state, PlantInput(0.0, 0.0), dt, params, derived)


def test_euler_step_raises_on_non_finite(params, derived):
    state = MotorState(1e308, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(NonFiniteStateError):
        euler_step(state, PlantInput(0.0, 0.0), 1.0, params, derived)


def test_simulate_fine_with_one_substep_is_euler(params, derived, running_state):
    inp = PlantInput(-50.0, 20.0, 350.0)
    assert simulate_fine(running_state, inp, 4e-4, 1, params, derived) == euler_step(
        running_state, inp, 4e-4, params, derived
    )


def test_simulate_fine_rejects_zero_substeps(params, derived, running_state):
    with pytest.raises(ValueError):
        simulate_fine(running_state, PlantInput(0.0, 0.0), 4e-4, 0, params, derived)


def test_stator_flux_of_premagnetized_state(params, derived):
    """
    Test sigma*Ls*i + (Lm/Lr)*lam_r on the standstill equilibrium (equals Ls*i_as).
    """
    state = premagnetized_state(params, 0.056)
    lam_as, lam_bs = stator_flux(state, params, derived)
    assert lam_as == pytest.approx(params.Ls * state.i_as)
    assert lam_bs == 0.0
