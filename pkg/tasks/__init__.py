"""

tasks
---------

This package provides the runnable entry points of the LIM drive simulation suite.

Scripts:
    - **lim_drive**: Command-line interface with the run, compare, sweep, validate and
    bench subcommands.

"""
