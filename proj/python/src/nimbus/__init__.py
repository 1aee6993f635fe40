"""Cloud deployment simulator: scenarios in, response-time and cost reports out."""

from ._core import (
    CapacityError,
    InvariantError,
    ScenarioError,
    builtin_names,
    builtin_scenario,
    compare,
    normalize_scenario,
    render_tables,
    run,
    run_json,
    validate_scenario,
    write_outputs,
)

__all__ = [
    "CapacityError",
    "InvariantError",
    "ScenarioError",
    "builtin_names",
    "builtin_scenario",
    "compare",
    "normalize_scenario",
    "render_tables",
    "run",
    "run_json",
    "validate_scenario",
    "write_outputs",
]
