"""Simulation of bandwidth-limited distributed models and induced-subgraph algorithms."""

from .graphs import (
    Coloring,
    CliqueCover,
    Graph,
    GraphError,
    McisMapping,
    PatternGraph,
    ScaleError,
    SubgraphWitness,
    TreeDecomposition,
)
from .graphio import read_graph, write_graph
from .sim import (
    BandwidthViolation,
    BroadcastViolation,
    ExecutionResult,
    ModelKind,
    NodeProgram,
    NonTermination,
    SimModel,
    SimulationError,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "Coloring",
    "CliqueCover",
    "Graph",
    "GraphError",
    "McisMapping",
    "PatternGraph",
    "ScaleError",
    "SubgraphWitness",
    "TreeDecomposition",
    "read_graph",
    "write_graph",
    "BandwidthViolation",
    "BroadcastViolation",
    "ExecutionResult",
    "ModelKind",
    "NodeProgram",
    "NonTermination",
    "SimModel",
    "SimulationError",
    "run",
]
