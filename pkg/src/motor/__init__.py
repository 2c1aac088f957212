"""

motor
-----

Plant-side models of the linear induction motor drive.

Modules:
    - **lim_model**: Continuous-time LIM model in the alpha-beta frame, derived
    constants and forward-Euler discretization.
    - **inverter**: Two-level three-phase inverter: switch states, switch-to-voltage
    map and switch-transition count.

"""
