"""

src
---

This package provides the code of the LIM drive simulation suite,
organized into packages by logical function

Packages:
    - **motor:** Linear induction motor model and two-level inverter.
    - **estimators:** Secondary flux estimation.
    - **controllers:** Enumerative NMPC and the DTC baseline.
    - **simulation:** Scenarios, closed-loop harness, traces, metrics and benchmarks.

"""
