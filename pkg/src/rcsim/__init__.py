"""Self-triggered resilient consensus on undirected networks.

Normal nodes poll their neighbors at self-scheduled instants, drop up to
``F`` extreme values on each side of their own state and move with a
quantized sign control. The package simulates such networks exactly,
injects misbehaving nodes, and checks the resulting trajectories.
"""

from .adversary import AttackSpec
from .engine import Simulation, Trace, run
from .graph import Graph, check_assumption, common_neighbors, gen_clique_core, gen_complete, gen_fig1
from .metrics import Verdict, evaluate
from .protocol import ProtocolParams, normal_round
from .scenario import Scenario, build, fig1_experiment

__version__ = "0.1.0"

__all__ = [
    "AttackSpec", "Graph", "ProtocolParams", "Scenario", "Simulation", "Trace", "Verdict",
    "build", "check_assumption", "common_neighbors", "evaluate", "fig1_experiment",
    "gen_clique_core", "gen_complete", "gen_fig1", "normal_round", "run",
]
