# pylint: skip-file
"""
Test for module src.simulation.scenario
"""

import configparser
import os

import pytest

from src.controllers.dtc import DtcConfig
from src.controllers.enmpc import ControllerConfig
from src.motor.lim_model import NOMINAL_MOTOR
from src.simulation.scenario import (
    SCENARIO_DIR,
    LoadProfile,
    ScenarioError,
    SpeedProfile,
    apply_override,
    load_scenario,
    resolve_scenario,
    shipped_scenarios,
)

MINIMAL = """
[scenario]
name = minimal
duration = 0.01
Ts = 1e-4
vdc = 255.0

[speed_profile]
knots = 0.0:0.0, 0.005:1.0

[load_profile]
steps = 0.0:0.0, 0.004:100.0
"""


@pytest.fixture
def write_scenario(tmp_path):
    def _write(text, name='scenario.ini'):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)

    return _write


def test_load_minimal_scenario_defaults(write_scenario):
    """
    Test that omitted sections fall back to the test motor, the default ENMPC tuning
    and a de-energized standstill.
    """
    scenario = load_scenario(write_scenario(MINIMAL))
    assert scenario.name == 'minimal'
    assert scenario.kind == 'enmpc'
    assert scenario.motor == NOMINAL_MOTOR
    assert scenario.controller_motor == NOMINAL_MOTOR
    assert scenario.controller == ControllerConfig()
    assert tuple(scenario.initial_state) == (0.0,) * 5
    assert scenario.n_ticks == 101
    assert len(scenario.times) == 101
    assert scenario.events == (0.004, 0.005)
    assert scenario.F_L_assumed == 0.0


def test_name_defaults_to_file_stem(write_scenario):
    path = write_scenario(MINIMAL.replace('name = minimal\n', ''), name='ramp_up.ini')
    assert load_scenario(path).name == 'ramp_up'


def test_load_high_speed_scenario():
    scenario = load_scenario(os.path.join(SCENARIO_DIR, 'high_speed.ini'))
    assert scenario.name == 'high-speed'
    assert scenario.n_ticks == 10001
    assert scenario.controller.N == 4
    assert scenario.controller.P_sw == (1.0,)
    assert scenario.controller.schedule == ((1e-4, 2), (4e-4, 2))
    assert scenario.initial_state.i_as == pytest.approx(0.056 / NOMINAL_MOTOR.Lm)
    assert scenario.initial_state.lam_ar == 0.056
    assert scenario.events == (0.2, 0.5)


def test_rs_perturbation_only_hits_the_plant():
    plus = load_scenario(resolve_scenario('rs-plus-50'))
    minus = load_scenario(resolve_scenario('rs_minus_50'))
    assert plus.motor.Rs == pytest.approx(1.5 * NOMINAL_MOTOR.Rs)
    assert minus.motor.Rs == pytest.approx(0.5 * NOMINAL_MOTOR.Rs)
    assert plus.controller_motor.Rs == minus.controller_motor.Rs == NOMINAL_MOTOR.Rs


def test_shipped_scenarios_all_load():
    names = {scenario.name for scenario in shipped_scenarios()}
    assert names == {'high-speed', 'low-speed', 'rs-plus-50', 'rs-minus-50', 'pj-sweep'}


def test_kind_override_builds_dtc_from_model_motor(write_scenario):
    scenario = load_scenario(write_scenario(MINIMAL + '\n[dtc]\nflux_ref = 0.3\n'), kind='dtc')
    assert scenario.kind == 'dtc'
    assert isinstance(scenario.controller, DtcConfig)
    assert scenario.controller.flux_ref == 0.3
    assert scenario.controller.Ki == pytest.approx(NOMINAL_MOTOR.M * 60.0**2)


def test_dtc_samples_at_its_own_period():
    """
    Test that [dtc] Ts replaces the scenario period for the DTC run only.
    """
    enmpc = load_scenario(resolve_scenario('high-speed'))
    dtc = load_scenario(resolve_scenario('high-speed'), kind='dtc')
    assert enmpc.Ts == 1e-4
    assert dtc.Ts == 2e-5
    assert dtc.n_ticks == 50001


def test_dtc_without_own_period_keeps_scenario_period(write_scenario):
    scenario = load_scenario(write_scenario(MINIMAL + '\n[dtc]\nKp = 10\n'), kind='dtc')
    assert scenario.Ts == 1e-4
    with pytest.raises(ScenarioError, match='Ts'):
        load_scenario(write_scenario(MINIMAL + '\n[dtc]\nTs = 0.1\n'), kind='dtc')


def test_shipped_files_spell_out_dtc_tuning():
    """
    Test that every shipped file carries the full DTC block, matching the defaults
    derived from its controller motor.
    """
    keys = ('Ts', 'Kp', 'Ki', 'flux_ref', 'flux_band', 'force_band', 'force_limit')
    for entry in sorted(os.listdir(SCENARIO_DIR)):
        if not entry.endswith('.ini'):
            continue
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        parser.read(os.path.join(SCENARIO_DIR, entry), encoding='utf-8')
        assert parser.has_section('dtc'), entry
        assert tuple(parser['dtc']) == keys, entry

        config = load_scenario(os.path.join(SCENARIO_DIR, entry), kind='dtc').controller
        assert config.Kp == pytest.approx(297.5545, rel=1e-6)
        assert config.Ki == pytest.approx(10008.0)
        assert (config.flux_ref, config.flux_band, config.force_limit) == (0.16, 0.0032, 1300.0)
        assert config.force_band == pytest.approx(23.59, rel=1e-3)


def test_speed_scale_defaults_to_largest_reference(write_scenario):
    text = MINIMAL.replace('0.005:1.0', '0.005:-3.0')
    assert load_scenario(write_scenario(text)).controller.speed_scale == 3.0
    still = MINIMAL.replace('0.005:1.0', '0.005:0.0')
    assert load_scenario(write_scenario(still)).controller.speed_scale == 1.0
    explicit = text + '\n[controller]\nspeed_scale = 0.5\n'
    assert load_scenario(write_scenario(explicit)).controller.speed_scale == 0.5


@pytest.mark.parametrize(
    'name, speed_scale', [('high-speed', 2.0), ('pj-sweep', 2.0), ('low-speed', 0.1)]
)
def test_shipped_speed_scale(name, speed_scale):
    controller = load_scenario(resolve_scenario(name)).controller
    assert controller.speed_scale == speed_scale
    assert controller.K_gain == 22.5


def test_estimator_motor_selection(write_scenario):
    """
    Test that the flux estimator defaults to the plant constants and follows the
    controller motor on request.
    """
    text = MINIMAL + '\n[motor]\nRs = 8.0\n'
    assert load_scenario(write_scenario(text)).flux_estimator_motor.Rs == 8.0
    nominal = load_scenario(write_scenario(text + '\n[estimator]\nmotor = controller\n'))
    assert nominal.flux_estimator_motor == nominal.controller_motor == NOMINAL_MOTOR


def test_overrides_patch_values_and_list_entries(write_scenario):
    text = MINIMAL + '\n[controller]\nNu = 2\nP_sw = 1.0, 0.5\n'
    scenario = load_scenario(write_scenario(text), {'controller.P_sw.0': '10', 'motor.Rs': '8.0'})
    assert scenario.controller.P_sw == (10.0, 0.5)
    assert scenario.motor.Rs == 8.0
    assert scenario.controller_motor.Rs == NOMINAL_MOTOR.Rs


def test_initial_state_keys_override_premagnetization(write_scenario):
    text = MINIMAL + '\n[initial_state]\npremagnetized_flux = 0.056\nv = 0.5\n'
    state = load_scenario(write_scenario(text)).initial_state
    assert state.lam_ar == 0.056
    assert state.v == 0.5


def test_controller_section_parses_types(write_scenario):
    text = MINIMAL + (
        '\n[controller]\nkind = ENMPC\nschedule = 1e-4:10\npreview = false\n'
        'parallel_candidates = no\ncoarse_substeps = 4\nF_L_assumed = 350\n'
    )
    scenario = load_scenario(write_scenario(text))
    assert scenario.controller.schedule == ((1e-4, 10),)
    assert scenario.controller.preview is False
    assert scenario.controller.parallel_candidates is False
    assert scenario.controller.coarse_substeps == 4
    assert scenario.F_L_assumed == 350.0


@pytest.mark.parametrize(
    'text, message',
    [
        (MINIMAL.replace('duration = 0.01\n', ''), 'duration'),
        (MINIMAL.replace('vdc = 255.0', 'vdc = fast'), 'not a number'),
        (MINIMAL.replace('vdc = 255.0', 'vdc = 0.0'), 'Vdc'),
        (MINIMAL.replace('Ts = 1e-4', 'Ts = 0.1'), 'Ts'),
        (MINIMAL.replace('0.005:1.0', '0.005'), 'time:value'),
        (MINIMAL.replace('knots = 0.0:0.0', 'knots = 0.001:0.0'), 't = 0'),
        (MINIMAL + '\n[plant]\nRs = 1\n', 'unknown section'),
        (MINIMAL + '\n[motor]\nresistance = 1\n', "unknown key 'resistance'"),
        (MINIMAL + '\n[motor]\nRs = -1\n', 'Rs'),
        (MINIMAL + '\n[controller]\nkind = pid\n', 'pid'),
        (MINIMAL + '\n[controller]\nNu = 2\n', 'P_sw'),
        (MINIMAL + '\n[controller]\nNu = two\n', 'integer'),
        (MINIMAL + '\n[estimator]\nmotor = nominal\n', 'nominal'),
        ('[scenario\nduration = 1\n', 'malformed'),
    ],
)
def test_invalid_scenarios(write_scenario, text, message):
    with pytest.raises(ScenarioError, match=message):
        load_scenario(write_scenario(text))


def test_missing_file_raises_scenario_error(tmp_path):
    with pytest.raises(ScenarioError, match='cannot read'):
        load_scenario(str(tmp_path / 'absent.ini'))


@pytest.mark.parametrize(
    'key, message',
    [
        ('motor', 'section.key'),
        ('motor.Rs.0.1', 'section.key'),
        ('motor.resistance', 'unknown key'),
        ('controller.P_sw.x', 'non-integer'),
        ('controller.P_sw.3', 'out of range'),
        ('controller.schedule.0', 'absent'),
    ],
)
def test_apply_override_rejects(key, message):
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser.read_string('[controller]\nP_sw = 1.0, 0.5\n')
    with pytest.raises(ScenarioError, match=message):
        apply_override(parser, key, '1')


def test_apply_override_adds_missing_section():
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    apply_override(parser, 'controller_motor.Rs', '2.5')
    assert parser['controller_motor']['Rs'] == '2.5'


def test_resolve_scenario():
    assert resolve_scenario('high-speed') == os.path.join(SCENARIO_DIR, 'high_speed.ini')
    assert resolve_scenario('low_speed.ini') == os.path.join(SCENARIO_DIR, 'low_speed.ini')
    with pytest.raises(ScenarioError):
        resolve_scenario('no-such-scenario')


def test_speed_profile_interpolates_and_holds():
    profile = SpeedProfile(((0.0, 0.0), (0.2, 2.0), (1.0, 2.0)))
    assert profile.at(0.1) == pytest.approx(1.0)
    assert profile.at(0.5) == 2.0
    assert profile.at(3.0) == 2.0
    assert list(profile.sample([0.0, 0.05])) == pytest.approx([0.0, 0.5])
    assert profile.events == (0.2,)


def test_speed_profile_collinear_knots_are_not_events():
    # only the end of the ramp changes the slope
    assert SpeedProfile(((0.0, 0.0), (0.1, 1.0), (0.2, 2.0))).events == (0.2,)


@pytest.mark.parametrize(
    'knots',
    [(), ((0.1, 0.0),), ((0.0, 0.0), (0.0, 1.0)), ((0.0, float('nan')),)],
)
def test_speed_profile_validation(knots):
    with pytest.raises(ValueError):
        SpeedProfile(knots)


def test_load_profile_steps():
    """
    Test that a step applies from its own instant on, with float slack on the instant.
    """
    profile = LoadProfile(((0.0, 350.0), (0.5, 500.0)))
    assert profile.at(0.0) == 350.0
    assert profile.at(0.4999) == 350.0
    assert profile.at(5000 * 1e-4) == 500.0
    assert profile.at(0.5 - 1e-13) == 500.0
    assert profile.at(2.0) == 500.0
    assert profile.events == (0.5,)


def test_load_profile_repeated_value_is_not_an_event():
    assert LoadProfile(((0.0, 1.0), (0.3, 1.0), (0.6, 2.0))).events == (0.6,)
