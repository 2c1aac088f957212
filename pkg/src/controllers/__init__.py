"""

controllers
-----------

Speed controllers acting directly on the inverter switches.

Modules:
    - **base**: Inputs, diagnostics and protocol shared by the controllers.
    - **enmpc**: Enumerative nonlinear model predictive controller with pruned search.
    - **dtc**: Classical direct thrust control baseline (PI speed loop, hysteresis
    comparators, switching table).

"""
