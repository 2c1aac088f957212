"""

simulation
----------

Closed-loop harness around the plant, the flux estimator and a controller.

Modules:
    - **scenario**: Scenario files (INI), profiles and dotted-key overrides.
    - **closed_loop**: Tick loop at the sampling period, parallel batches with dask.
    - **trace**: Per-tick records, CSV and netCDF persistence.
    - **metrics**: Switching frequency, tracking, settling, ripple and constraint figures.
    - **benchmark**: Controller step latency distribution.

"""
