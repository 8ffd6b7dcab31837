"""edgecombat: economical DDoS combat simulation with joint defense at the edge."""

from .allocation import Allocation, InfeasibleError, WorkloadProblem
from .dynamics import CombatParams, PopulationState, Trajectory
from .expense import (
    BotnetPricing,
    CapabilityVector,
    DefenseMatrix,
    ExpenseReport,
    MitigationProfile,
)
from .scenario import Scenario, ScenarioError, load_scenario
from .topology import Link, NetworkGraph, Node, RouteLifetimeModel

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "BotnetPricing",
    "CapabilityVector",
    "CombatParams",
    "DefenseMatrix",
    "ExpenseReport",
    "InfeasibleError",
    "Link",
    "MitigationProfile",
    "NetworkGraph",
    "Node",
    "PopulationState",
    "RouteLifetimeModel",
    "Scenario",
    "ScenarioError",
    "Trajectory",
    "WorkloadProblem",
    "load_scenario",
]
