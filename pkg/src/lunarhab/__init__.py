"""Two-zone lunar habitat simulator with fire disruption, cascading
component damage, synthetic fault detection and agent repair."""

from .config import ScenarioConfig, ScenarioError, dump_scenario, parse_scenario, parse_scenario_text
from .resilience import MarginGrid, run_batch
from .scenario import RunResult, TimeSeries, run_scenario

__all__ = [
    "MarginGrid",
    "RunResult",
    "ScenarioConfig",
    "ScenarioError",
    "TimeSeries",
    "dump_scenario",
    "parse_scenario",
    "parse_scenario_text",
    "run_batch",
    "run_scenario",
]
__version__ = "0.1.0"
