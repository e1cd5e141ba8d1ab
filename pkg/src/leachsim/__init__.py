"""Round-based simulator for LEACH-family cluster routing in wireless sensor networks."""

from .core import (ConfigError, EpochState, Node, Position, Protocol, RadioParams, Role,
                   ScenarioConfig, distance, midpoint)
from .engine import NetworkState, Simulation, Streams, deploy, run
from .metrics import (LifetimeSummary, RoundReport, SimulationTrace, aggregate_seeds,
                      percent_improvement, summarize)

__all__ = [
    "ConfigError", "EpochState", "Node", "Position", "Protocol", "RadioParams", "Role",
    "ScenarioConfig", "distance", "midpoint", "NetworkState", "Simulation", "Streams",
    "deploy", "run", "LifetimeSummary", "RoundReport", "SimulationTrace", "aggregate_seeds",
    "percent_improvement", "summarize",
]
