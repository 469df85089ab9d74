"""Scenario loading and the experiment harness."""

from twincontract.experiments.harness import (
    MECHANISMS,
    FeasibilityMatrix,
    SweepRow,
    run_feasibility_matrix,
    run_mechanism,
    sweep_data_size,
    write_sweep_csv,
)
from twincontract.experiments.scenario import (
    Scenario,
    ScenarioFile,
    load_default_scenario,
    load_scenario,
    parse_scenario,
)

__all__ = [
    "MECHANISMS",
    "FeasibilityMatrix",
    "Scenario",
    "ScenarioFile",
    "SweepRow",
    "load_default_scenario",
    "load_scenario",
    "parse_scenario",
    "run_feasibility_matrix",
    "run_mechanism",
    "sweep_data_size",
    "write_sweep_csv",
]
