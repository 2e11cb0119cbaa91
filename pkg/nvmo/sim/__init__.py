from .assumptions import AssumptionMonitor, check_assumptions
from .runner import (
    TargetStatistics,
    averaging_report,
    run,
    target_statistics,
    tracking_report,
    world_step,
)
from .scenario import Scenario, VelocityProfile, load_scenario, parse_scenario

__all__ = [
    "AssumptionMonitor",
    "Scenario",
    "TargetStatistics",
    "VelocityProfile",
    "averaging_report",
    "check_assumptions",
    "load_scenario",
    "parse_scenario",
    "run",
    "target_statistics",
    "tracking_report",
    "world_step",
]
