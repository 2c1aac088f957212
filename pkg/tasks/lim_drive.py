"""
Command-line entry point of the LIM drive simulation suite.

.. note::

    The following environment variables are used by the script, along with their
    default values:

    +-----------------------+-----------------------+-------------------------------------+
    | Variable Name         | Default Value         | Description                         |
    +-----------------------+-----------------------+-------------------------------------+
    | LOG_LEVEL             | INFO                  | Sets the logging level for the      |
    |                       |                       | application.                        |
    +-----------------------+-----------------------+-------------------------------------+
    | LOG_FILE              | /tmp/lim_drive.log    | Time-rotated log file.              |
    +-----------------------+-----------------------+-------------------------------------+
    | DASK_SCHEDULER        | threads               | Dask scheduler for compare, sweep   |
    |                       |                       | and parallel candidate evaluation.  |
    +-----------------------+-----------------------+-------------------------------------+

Subcommands
-----------

1. **run**: Simulate one scenario, write the CSV trace (and optionally the metrics and
   a netCDF copy of the trace).

2. **compare**: Run the ENMPC and the DTC baseline on the same plant and print their
   metrics side by side with the switching-frequency reduction.

3. **sweep**: Run one scenario for several values of a dotted parameter key, e.g.
   ``controller.P_sw.0``.

4. **validate**: Parse a scenario and check its invariants only.

5. **bench**: Per-step controller latency distribution, optionally for the multi-rate,
   single-rate and Nu = 2 prediction grids.

Scenarios are given as a file path or as the name of a shipped scenario
(``high-speed``, ``low-speed``, ``rs-plus-50``, ``rs-minus-50``, ``pj-sweep``).

Exit codes: 0 on success, 2 on usage or scenario validation errors, 1 on runtime
failures (aborted simulation, unwritable output).

Usage
-----

.. code-block:: bash

    python -m tasks.lim_drive run --scenario high-speed --out /tmp/high_speed.csv
    python -m tasks.lim_drive compare --scenario high-speed
    python -m tasks.lim_drive sweep --scenario pj-sweep --param controller.P_sw.0 --values 1,10000
"""

import argparse
import logging
import sys
from typing import Sequence

from src.simulation.benchmark import LatencyReport, benchmark, compare_schedules
from src.simulation.closed_loop import SimulationAbortedError, run, run_many
from src.simulation.metrics import Metrics
from src.simulation.scenario import (
    CONTROLLER_KINDS,
    Scenario,
    ScenarioError,
    load_scenario,
    resolve_scenario,
)
from src.simulation.trace import Trace, TraceIOError, write_trace, write_trace_netcdf
from utils.logging_utils import setup_module_logger, setup_root_logging
from utils.metrics_formatter import FORMATS, MetricsFormatter, format_table

logger: logging.Logger = setup_module_logger(__name__)


def _overrides(pairs: Sequence[str]) -> dict[str, str]:
    overrides: dict[str, str] = {}
    for pair in pairs:
        key, sep, value = pair.partition('=')
        if not sep or not key.strip():
            raise ScenarioError(f"--set '{pair}' must look like section.key=value")
        overrides[key.strip()] = value.strip()
    return overrides


def _load(args: argparse.Namespace, kind: str | None = None) -> Scenario:
    return load_scenario(
        resolve_scenario(args.scenario),
        _overrides(getattr(args, 'set', None) or []),
        kind or getattr(args, 'kind', None),
    )


def _write_text(path: str, text: str) -> None:
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(text + '\n')


def cmd_run(args: argparse.Namespace) -> int:
    """
    Simulate one scenario and persist its trace.
    """
    scenario: Scenario = _load(args)
    trace, metrics = run(scenario, record_timing=not args.no_timing)
    write_trace(trace, args.out)
    logger.info("Trace written to %s", args.out)
    if args.netcdf:
        write_trace_netcdf(
            trace, args.netcdf, {'scenario': scenario.name, 'controller': scenario.kind}
        )
    text: str = MetricsFormatter(metrics.as_dict()).format(args.metrics_format)
    if args.metrics:
        _write_text(args.metrics, text)
    else:
        print(text)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    """
    ENMPC against the DTC baseline on the same plant.
    """
    scenarios: list[Scenario] = [_load(args, kind) for kind in CONTROLLER_KINDS]
    results: list[tuple[Trace, Metrics]] = run_many(scenarios, record_timing=not args.no_timing)
    rows: list[dict[str, object]] = [
        {'controller': scenario.kind, **metrics.as_dict()}
        for scenario, (_, metrics) in zip(scenarios, results)
    ]
    print(format_table(rows, args.metrics_format))

    enmpc, dtc = (metrics.transitions_per_second for _, metrics in results)
    if dtc > 0.0:
        print(f"switching_reduction_percent={100.0 * (1.0 - enmpc / dtc)!r}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    """
    One run per value of a dotted parameter key.
    """
    values: list[str] = [x.strip() for x in args.values.split(',') if x.strip()]
    if not values:
        raise ScenarioError("--values needs at least one value")
    base: dict[str, str] = _overrides(args.set or [])
    path: str = resolve_scenario(args.scenario)
    scenarios: list[Scenario] = [
        load_scenario(path, {**base, args.param: value}) for value in values
    ]
    results: list[tuple[Trace, Metrics]] = run_many(scenarios, record_timing=not args.no_timing)
    rows: list[dict[str, object]] = [
        {args.param: value, **metrics.as_dict()} for value, (_, metrics) in zip(values, results)
    ]
    print(format_table(rows, args.metrics_format))
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    """
    Parse and check a scenario without simulating it.
    """
    scenario: Scenario = _load(args)
    print(f"ok: {scenario.name} ({scenario.kind}, {scenario.n_ticks} ticks)")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    """
    Controller step latency distribution.
    """
    scenario: Scenario = _load(args)
    reports: list[LatencyReport] = (
        compare_schedules(scenario, args.duration)
        if args.compare_schedules
        else [benchmark(scenario, args.duration)]
    )
    print(format_table([report.as_dict() for report in reports], args.metrics_format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    """
    :return: the argument parser with its five subcommands.
    :rtype: argparse.ArgumentParser
    """
    parser: argparse.ArgumentParser = argparse.ArgumentParser(
        prog='lim_drive', description="LIM speed-tracking simulation suite (ENMPC vs DTC)."
    )
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    def _common(sub: argparse.ArgumentParser, scenario_required: bool = True) -> None:
        sub.add_argument(
            '--scenario',
            required=scenario_required,
            default=None if scenario_required else 'high-speed',
            help="scenario file or shipped scenario name",
        )
        sub.add_argument(
            '--set',
            action='append',
            metavar='KEY=VALUE',
            help="dotted-key override, e.g. motor.Rs=8.05 (repeatable)",
        )
        sub.add_argument('--metrics-format', choices=FORMATS, default='kv')

    run_parser: argparse.ArgumentParser = subparsers.add_parser('run', help="simulate a scenario")
    _common(run_parser)
    run_parser.add_argument('--out', required=True, help="CSV trace file")
    run_parser.add_argument('--metrics', help="metrics file, printed on stdout when omitted")
    run_parser.add_argument('--netcdf', help="also write the trace as netCDF")
    run_parser.add_argument(
        '--kind', choices=CONTROLLER_KINDS, help="override the controller kind"
    )
    run_parser.add_argument(
        '--no-timing', action='store_true', help="record 0.0 compute times (reproducible traces)"
    )
    run_parser.set_defaults(func=cmd_run)

    compare_parser: argparse.ArgumentParser = subparsers.add_parser(
        'compare', help="ENMPC vs DTC on the same plant"
    )
    _common(compare_parser)
    compare_parser.add_argument('--no-timing', action='store_true')
    compare_parser.set_defaults(func=cmd_compare)

    sweep_parser: argparse.ArgumentParser = subparsers.add_parser(
        'sweep', help="one run per parameter value"
    )
    _common(sweep_parser)
    sweep_parser.add_argument('--param', required=True, help="dotted key, e.g. controller.P_sw.0")
    sweep_parser.add_argument('--values', required=True, help="comma-separated values")
    sweep_parser.add_argument('--no-timing', action='store_true')
    sweep_parser.set_defaults(func=cmd_sweep)

    validate_parser: argparse.ArgumentParser = subparsers.add_parser(
        'validate', help="check a scenario without simulating"
    )
    _common(validate_parser)
    validate_parser.add_argument('--kind', choices=CONTROLLER_KINDS)
    validate_parser.set_defaults(func=cmd_validate)

    bench_parser: argparse.ArgumentParser = subparsers.add_parser(
        'bench', help="controller step latency"
    )
    _common(bench_parser, scenario_required=False)
    bench_parser.add_argument(
        '--duration', type=float, default=0.05, help="simulated time per benchmark [s]"
    )
    bench_parser.add_argument(
        '--compare-schedules',
        action='store_true',
        help="multi-rate, single-rate N=10 and Nu=2 prediction grids side by side",
    )
    bench_parser.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """
    :param Sequence argv: arguments without the program name, sys.argv by default.
    :return: process exit code.
    :rtype: int
    """
    parser: argparse.ArgumentParser = build_parser()
    try:
        args: argparse.Namespace = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    setup_root_logging()
    try:
        return args.func(args)
    except ValueError as exc:
        # ScenarioError and invalid option combinations
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationAbortedError as exc:
        logger.error("Simulation aborted: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TraceIOError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
