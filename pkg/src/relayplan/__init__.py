"""Joint relay (HAP) placement and channel-bandwidth assignment for predictive flying networks."""

from .assignment import BandwidthAssignment, ChannelSet, Solution
from .channel import RadioParams
from .objective import PenaltyBreakdown, penalized_utility
from .scenario import Scenario, TimeGrid, Vec3, Zone, generate_scenario, load_scenario, save_scenario
from .solvers import DesParams, SaParams, SolverResult, run_solver

__all__ = [
    "BandwidthAssignment",
    "ChannelSet",
    "DesParams",
    "PenaltyBreakdown",
    "RadioParams",
    "SaParams",
    "Scenario",
    "Solution",
    "SolverResult",
    "TimeGrid",
    "Vec3",
    "Zone",
    "generate_scenario",
    "load_scenario",
    "penalized_utility",
    "run_solver",
    "save_scenario",
]
