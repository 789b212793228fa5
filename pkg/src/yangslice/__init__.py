"""Exact verification of truncated shifted Yangian images in difference operators."""

from .cartan import CartanDatum, CartanError, Coweight, build_cartan, shift_data
from .gklo import GKLOContext, build_context, verify_relations
from .scenario import Scenario, ScenarioError, load_scenario, run_scenario

__all__ = [
    "CartanDatum", "CartanError", "Coweight", "build_cartan", "shift_data",
    "GKLOContext", "build_context", "verify_relations",
    "Scenario", "ScenarioError", "load_scenario", "run_scenario",
]
__version__ = "0.1.0"
