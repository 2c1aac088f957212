"""
This module loads closed-loop scenarios from INI files.

A scenario file holds the plant and model motor constants, the speed and load
profiles, the initial state and the controller tuning. Dotted override keys
(``section.key`` or ``section.key.index``) patch the parsed file before the Scenario
is built, which is how sweeps address a single parameter.

Classes:
    ScenarioError -- Raised for unreadable or invalid scenario files.
    SpeedProfile -- Piecewise-linear speed reference.
    LoadProfile -- Piecewise-constant load force.
    Scenario -- Everything one closed-loop run needs.

Functions:
    - load_scenario: Parse a scenario file, with optional overrides.
    - apply_override: Patch one dotted key of a parsed file.
    - shipped_scenarios: The scenarios delivered with the repository.
    - resolve_scenario: Find a scenario by file path or shipped name.

Dependencies:
    - configparser
    - numpy
    - src.controllers, src.motor
    - utils.logging_utils
"""

__all__ = [
    'ScenarioError',
    'SpeedProfile',
    'LoadProfile',
    'Scenario',
    'CONTROLLER_KINDS',
    'ESTIMATOR_MOTORS',
    'SCENARIO_DIR',
    'load_scenario',
    'apply_override',
    'shipped_scenarios',
    'resolve_scenario',
]

import configparser
from dataclasses import dataclass, fields, replace
import logging
import math
import os
from typing import Mapping

import numpy as np

from src.controllers.dtc import DtcConfig, default_dtc_config
from src.controllers.enmpc import ControllerConfig
from src.motor.inverter import InverterParams
from src.motor.lim_model import NOMINAL_MOTOR, MotorParams, MotorState, premagnetized_state
from utils.logging_utils import setup_module_logger

logger: logging.Logger = setup_module_logger(__name__)

SCENARIO_DIR: str = os.path.join(
    os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))), 'scenarios'
)
CONTROLLER_KINDS: tuple[str, ...] = ('enmpc', 'dtc')

# load step instants are compared with this absolute slack [s]
_TIME_TOLERANCE: float = 1.0e-12

_MOTOR_KEYS: tuple[str, ...] = tuple(f.name for f in fields(MotorParams))
_ENMPC_KEYS: tuple[str, ...] = tuple(f.name for f in fields(ControllerConfig))
_DTC_KEYS: tuple[str, ...] = tuple(f.name for f in fields(DtcConfig))
_STATE_KEYS: tuple[str, ...] = MotorState._fields

SCHEMA: dict[str, tuple[str, ...]] = {
    'scenario': ('name', 'duration', 'Ts', 'vdc'),
    'motor': _MOTOR_KEYS,
    'controller_motor': _MOTOR_KEYS,
    'speed_profile': ('knots',),
    'load_profile': ('steps',),
    'initial_state': _STATE_KEYS + ('premagnetized_flux',),
    'controller': ('kind', 'F_L_assumed') + _ENMPC_KEYS,
    'dtc': _DTC_KEYS + ('Ts',),
    'estimator': ('motor',),
}
ESTIMATOR_MOTORS: tuple[str, ...] = ('plant', 'controller')


class ScenarioError(ValueError):
    """
    Invalid scenario file, key or override.
    """


@dataclass(frozen=True)
class SpeedProfile:
    """
    Piecewise-linear speed reference, held constant after the last knot.

    Attributes:
        knots (tuple[tuple[float, float], ...]): (time [s], speed [m/s]) pairs.
    """

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'knots', tuple((float(t), float(w)) for t, w in self.knots))
        if not self.knots:
            raise ValueError("SpeedProfile needs at least one knot")
        times: list[float] = [t for t, _ in self.knots]
        if times[0] != 0.0:
            raise ValueError("SpeedProfile must start at t = 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("SpeedProfile knot times must be strictly increasing")
        if not all(math.isfinite(w) for _, w in self.knots):
            raise ValueError("SpeedProfile speeds must be finite")

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.knots])

    @property
    def values(self) -> np.ndarray:
        return np.array([w for _, w in self.knots])

    def at(self, t: float) -> float:
        """
        :param float t: time [s].
        :return: reference speed [m/s].
        :rtype: float
        """
        return float(np.interp(t, self.times, self.values))

    def sample(self, t: np.ndarray) -> np.ndarray:
        """
        :param np.ndarray t: times [s].
        :return: reference speeds [m/s].
        :rtype: np.ndarray
        """
        return np.interp(t, self.times, self.values)

    @property
    def events(self) -> tuple[float, ...]:
        """
        :return: knot times where the slope changes, the last knot included when the
            reference is still moving there.
        :rtype: tuple[float, ...]
        """
        found: list[float] = []
        for (t0, w0), (t1, w1), (t2, w2) in zip(self.knots, self.knots[1:], self.knots[2:]):
            if not math.isclose((w1 - w0) / (t1 - t0), (w2 - w1) / (t2 - t1)):
                found.append(t1)
        if len(self.knots) > 1 and self.knots[-1][1] != self.knots[-2][1]:
            found.append(self.knots[-1][0])
        return tuple(found)


@dataclass(frozen=True)
class LoadProfile:
    """
    Piecewise-constant load force: each step holds until the next one.

    Attributes:
        steps (tuple[tuple[float, float], ...]): (time [s], force [N]) pairs.
    """

    steps: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'steps', tuple((float(t), float(f)) for t, f in self.steps))
        if not self.steps:
            raise ValueError("LoadProfile needs at least one step")
        times: list[float] = [t for t, _ in self.steps]
        if times[0] != 0.0:
            raise ValueError("LoadProfile must start at t = 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("LoadProfile step times must be strictly increasing")
        if not all(math.isfinite(f) for _, f in self.steps):
            raise ValueError("LoadProfile forces must be finite")

    def at(self, t: float) -> float:
        """
        :param float t: time [s].
        :return: load force active at t [N].
        :rtype: float
        """
        times: np.ndarray = np.array([s for s, _ in self.steps])
        index: int = int(np.searchsorted(times, t + _TIME_TOLERANCE, side='right')) - 1
        return self.steps[max(index, 0)][1]

    @property
    def events(self) -> tuple[float, ...]:
        """
        :return: times where the load changes.
        :rtype: tuple[float, ...]
        """
        return tuple(
            t1 for (_, f0), (t1, f1) in zip(self.steps, self.steps[1:]) if f1 != f0
        )


@dataclass(frozen=True)
class Scenario:
    """
    One closed-loop experiment.

    Attributes:
        name (str): scenario name, stamped on log records.
        duration (float): simulated time [s].
        Ts (float): sampling period of controller and plant [s].
        vdc (float): DC-link voltage [V].
        motor (MotorParams): plant-side constants, possibly perturbed.
        controller_motor (MotorParams): model-side constants of the ENMPC predictor and
            of the DTC force estimate.
        speed_profile (SpeedProfile): speed reference.
        load_profile (LoadProfile): load force.
        controller (ControllerConfig | DtcConfig): controller kind and tuning.
        initial_state (MotorState): plant state at t = 0.
        F_L_assumed (float): load force assumed by the ENMPC predictor [N].
        source (str | None): file the scenario was read from.
        estimator_motor (MotorParams | None): constants of the flux estimator, the
            plant's when None.
    """

    name: str
    duration: float
    Ts: float
    vdc: float
    motor: MotorParams
    controller_motor: MotorParams
    speed_profile: SpeedProfile
    load_profile: LoadProfile
    controller: ControllerConfig | DtcConfig
    initial_state: MotorState
    F_L_assumed: float = 0.0
    source: str | None = None
    estimator_motor: MotorParams | None = None

    def __post_init__(self) -> None:
        if not self.duration > 0.0 or not math.isfinite(self.duration):
            raise ValueError("Scenario.duration must be > 0")
        if not self.Ts > 0.0 or not math.isfinite(self.Ts):
            raise ValueError("Scenario.Ts must be > 0")
        if self.Ts > self.duration:
            raise ValueError("Scenario.Ts must not exceed duration")
        InverterParams(self.vdc)
        if not all(math.isfinite(x) for x in self.initial_state):
            raise ValueError("Scenario.initial_state must be finite")

    @property
    def kind(self) -> str:
        """
        :return: 'enmpc' or 'dtc'.
        :rtype: str
        """
        return 'dtc' if isinstance(self.controller, DtcConfig) else 'enmpc'

    @property
    def inverter(self) -> InverterParams:
        return InverterParams(self.vdc)

    @property
    def flux_estimator_motor(self) -> MotorParams:
        """
        :return: constants the flux estimator integrates with.
        :rtype: MotorParams
        """
        return self.estimator_motor if self.estimator_motor is not None else self.motor

    @property
    def n_ticks(self) -> int:
        """
        :return: number of sampling instants, duration/Ts + 1.
        :rtype: int
        """
        return int(round(self.duration / self.Ts)) + 1

    @property
    def times(self) -> np.ndarray:
        """
        :return: the sampling instants k*Ts.
        :rtype: np.ndarray
        """
        return np.arange(self.n_ticks) * self.Ts

    @property
    def events(self) -> tuple[float, ...]:
        """
        :return: sorted speed-knot and load-step times strictly inside the run.
        :rtype: tuple[float, ...]
        """
        return tuple(
            sorted(
                {
                    t
                    for t in self.speed_profile.events + self.load_profile.events
                    if 0.0 < t < self.duration
                }
            )
        )

    def with_controller(self, controller: ControllerConfig | DtcConfig) -> 'Scenario':
        """
        :return: a copy running another controller on the same plant.
        :rtype: Scenario
        """
        return replace(self, controller=controller)


def _read(path: str) -> configparser.ConfigParser:
    parser: configparser.ConfigParser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # type: ignore[assignment,method-assign]
    try:
        with open(path, encoding='utf-8') as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read scenario file ({exc.strerror})") from exc
    except configparser.Error as exc:
        raise ScenarioError(f"{path}: malformed scenario file ({exc})") from exc

    for section in parser.sections():
        if section not in SCHEMA:
            raise ScenarioError(f"{path}: unknown section [{section}]")
        for key in parser[section]:
            if key not in SCHEMA[section]:
                raise ScenarioError(f"{path}: unknown key '{key}' in [{section}]")
    return parser


def apply_override(parser: configparser.ConfigParser, dotted_key: str, value: str) -> None:
    """
    Patch a parsed scenario file.

    ``section.key`` replaces the value; ``section.key.index`` replaces one element of
    a comma-separated list.

    :param configparser.ConfigParser parser: parsed scenario file.
    :param str dotted_key: e.g. ``motor.Rs`` or ``controller.P_sw.0``.
    :param str value: new value, as it would be written in the file.
    :raises ScenarioError: unknown key or index out of range.
    """
    parts: list[str] = dotted_key.split('.')
    if len(parts) not in (2, 3):
        raise ScenarioError(f"override '{dotted_key}' must look like section.key[.index]")
    section, key = parts[0], parts[1]
    if section not in SCHEMA or key not in SCHEMA[section]:
        raise ScenarioError(f"override '{dotted_key}' names an unknown key")
    if not parser.has_section(section):
        parser.add_section(section)

    if len(parts) == 2:
        parser[section][key] = value
        return

    try:
        index: int = int(parts[2])
    except ValueError as exc:
        raise ScenarioError(f"override '{dotted_key}' has a non-integer index") from exc
    if key not in parser[section]:
        raise ScenarioError(f"override '{dotted_key}' indexes a key absent from the file")
    items: list[str] = [x.strip() for x in parser[section][key].split(',')]
    if not 0 <= index < len(items):
        raise ScenarioError(
            f"override '{dotted_key}' index out of range (list has {len(items)} entries)"
        )
    items[index] = value.strip()
    parser[section][key] = ', '.join(items)


def _float(path: str, section: configparser.SectionProxy, key: str) -> float:
    try:
        return float(section[key])
    except ValueError as exc:
        raise ScenarioError(
            f"{path}: [{section.name}] {key} = '{section[key]}' is not a number"
        ) from exc


def _pairs(path: str, section: configparser.SectionProxy, key: str) -> list[tuple[float, float]]:
    pairs: list[tuple[float, float]] = []
    for item in section[key].split(','):
        left, sep, right = item.partition(':')
        try:
            if not sep:
                raise ValueError(item)
            pairs.append((float(left), float(right)))
        except ValueError as exc:
            raise ScenarioError(
                f"{path}: [{section.name}] {key} entry '{item.strip()}' is not a time:value pair"
            ) from exc
    return pairs


def _motor(path: str, parser: configparser.ConfigParser, name: str) -> MotorParams:
    if not parser.has_section(name):
        return NOMINAL_MOTOR
    section: configparser.SectionProxy = parser[name]
    values: dict[str, float] = {key: _float(path, section, key) for key in section}
    try:
        return replace(NOMINAL_MOTOR, **values)
    except ValueError as exc:
        raise ScenarioError(f"{path}: [{name}] {exc}") from exc


def _speed_scale(profile: SpeedProfile) -> float:
    # largest reference speed, 1 m/s for an all-zero reference
    peak: float = float(np.max(np.abs(profile.values)))
    return peak if peak > 0.0 else 1.0


def _enmpc_config(
    path: str, section: configparser.SectionProxy, speed_scale: float
) -> ControllerConfig:
    kwargs: dict[str, object] = {'speed_scale': speed_scale}
    for key in section:
        if key in ('kind', 'F_L_assumed'):
            continue
        if key == 'P_sw':
            try:
                kwargs[key] = tuple(float(x) for x in section[key].split(','))
            except ValueError as exc:
                raise ScenarioError(f"{path}: [controller] P_sw must be a list of numbers") from exc
        elif key == 'schedule':
            kwargs[key] = tuple((dt, int(n)) for dt, n in _pairs(path, section, key))
        elif key in ('Nu', 'coarse_substeps'):
            try:
                kwargs[key] = section.getint(key)
            except ValueError as exc:
                raise ScenarioError(f"{path}: [controller] {key} must be an integer") from exc
        elif key in ('preview', 'parallel_candidates'):
            try:
                kwargs[key] = section.getboolean(key)
            except ValueError as exc:
                raise ScenarioError(f"{path}: [controller] {key} must be a boolean") from exc
        else:
            kwargs[key] = _float(path, section, key)
    try:
        return ControllerConfig(**kwargs)  # type: ignore[arg-type]
    except ValueError as exc:
        raise ScenarioError(f"{path}: [controller] {exc}") from exc


def _dtc_config(
    path: str, parser: configparser.ConfigParser, model: MotorParams
) -> tuple[DtcConfig, float | None]:
    # returns the tuning and the DTC sampling period, None when [dtc] Ts is absent
    base: DtcConfig = default_dtc_config(model)
    if not parser.has_section('dtc'):
        return base, None
    section: configparser.SectionProxy = parser['dtc']
    values: dict[str, float] = {key: _float(path, section, key) for key in section}
    sampling: float | None = values.pop('Ts', None)
    try:
        return replace(base, **values), sampling
    except ValueError as exc:
        raise ScenarioError(f"{path}: [dtc] {exc}") from exc


def _estimator_motor(
    path: str, parser: configparser.ConfigParser, model: MotorParams
) -> MotorParams | None:
    choice: str = parser.get('estimator', 'motor', fallback='plant').strip().lower()
    if choice not in ESTIMATOR_MOTORS:
        raise ScenarioError(f"{path}: [estimator] motor '{choice}' not in {ESTIMATOR_MOTORS}")
    return model if choice == 'controller' else None


def _initial_state(
    path: str, parser: configparser.ConfigParser, plant: MotorParams
) -> MotorState:
    if not parser.has_section('initial_state'):
        return MotorState(0.0, 0.0, 0.0, 0.0, 0.0)
    section: configparser.SectionProxy = parser['initial_state']
    base: MotorState = MotorState(0.0, 0.0, 0.0, 0.0, 0.0)
    if 'premagnetized_flux' in section:
        base = premagnetized_state(plant, _float(path, section, 'premagnetized_flux'))
    return base._replace(
        **{key: _float(path, section, key) for key in section if key in _STATE_KEYS}
    )


def load_scenario(
    path: str,
    overrides: Mapping[str, str] | None = None,
    kind: str | None = None,
) -> Scenario:
    """
    Parse a scenario file.

    :param str path: INI file.
    :param Mapping overrides: dotted key -> value patches applied before parsing.
    :param str kind: 'enmpc' or 'dtc', replaces ``[controller] kind``. A DTC run is
        sampled at ``[dtc] Ts`` when the file sets it.
    :return: the validated scenario.
    :rtype: Scenario
    :raises ScenarioError: unreadable file, missing or malformed key, invalid values.
    """
    parser: configparser.ConfigParser = _read(path)
    for dotted_key, value in (overrides or {}).items():
        apply_override(parser, dotted_key, value)

    for section, key in (
        ('scenario', 'duration'),
        ('scenario', 'Ts'),
        ('scenario', 'vdc'),
        ('speed_profile', 'knots'),
        ('load_profile', 'steps'),
    ):
        if not parser.has_option(section, key):
            raise ScenarioError(f"{path}: missing mandatory key [{section}] {key}")

    head: configparser.SectionProxy = parser['scenario']
    if not parser.has_section('controller'):
        parser.add_section('controller')
    controller_section: configparser.SectionProxy = parser['controller']
    kind = kind or controller_section.get('kind', 'enmpc').strip().lower()
    if kind not in CONTROLLER_KINDS:
        raise ScenarioError(f"{path}: controller kind '{kind}' not in {CONTROLLER_KINDS}")

    plant: MotorParams = _motor(path, parser, 'motor')
    model: MotorParams = _motor(path, parser, 'controller_motor')

    try:
        speed_profile: SpeedProfile = SpeedProfile(
            tuple(_pairs(path, parser['speed_profile'], 'knots'))
        )
        Ts: float = _float(path, head, 'Ts')
        controller: ControllerConfig | DtcConfig
        if kind == 'enmpc':
            controller = _enmpc_config(path, controller_section, _speed_scale(speed_profile))
        else:
            controller, dtc_sampling = _dtc_config(path, parser, model)
            Ts = dtc_sampling if dtc_sampling is not None else Ts
        scenario: Scenario = Scenario(
            name=head.get('name', os.path.splitext(os.path.basename(path))[0]),
            duration=_float(path, head, 'duration'),
            Ts=Ts,
            vdc=_float(path, head, 'vdc'),
            motor=plant,
            controller_motor=model,
            speed_profile=speed_profile,
            load_profile=LoadProfile(tuple(_pairs(path, parser['load_profile'], 'steps'))),
            controller=controller,
            initial_state=_initial_state(path, parser, plant),
            F_L_assumed=(
                _float(path, controller_section, 'F_L_assumed')
                if 'F_L_assumed' in controller_section
                else 0.0
            ),
            source=path,
            estimator_motor=_estimator_motor(path, parser, model),
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"{path}: {exc}") from exc

    logger.debug(
        "Loaded scenario '%s' (%s, %d ticks) from %s",
        scenario.name,
        scenario.kind,
        scenario.n_ticks,
        path,
    )
    return scenario


def _shipped_paths() -> list[str]:
    return sorted(
        os.path.join(SCENARIO_DIR, entry)
        for entry in os.listdir(SCENARIO_DIR)
        if entry.endswith('.ini')
    )


def shipped_scenarios() -> list[Scenario]:
    """
    :return: the scenarios in the repository's ``scenarios`` directory, by file name.
    :rtype: list[Scenario]
    """
    return [load_scenario(path) for path in _shipped_paths()]


def resolve_scenario(name_or_path: str) -> str:
    """
    :param str name_or_path: a file path, or the name of a shipped scenario
        (``high_speed`` or ``high-speed``).
    :return: path of the scenario file.
    :rtype: str
    :raises ScenarioError: nothing matches.
    """
    if os.path.isfile(name_or_path):
        return name_or_path
    candidate: str = os.path.join(SCENARIO_DIR, name_or_path.replace('-', '_'))
    if not candidate.endswith('.ini'):
        candidate += '.ini'
    if os.path.isfile(candidate):
        return candidate
    raise ScenarioError(f"{name_or_path}: no such scenario file or shipped scenario")
