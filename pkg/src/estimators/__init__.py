"""

estimators
----------

Signal estimators feeding the controllers.

Modules:
    - **flux_estimator**: Secondary flux estimation from primary voltages and currents
    by primary-flux integration.

"""
