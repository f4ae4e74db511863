"""Maximum common induced subgraph parameterized by vertex cover number."""

from .centralized import mcis_centralized, mcis_with_counters
from .distributed import (
    MCIS_ROUND_CONSTANT,
    DisconnectedTopology,
    InfeasibleBudget,
    McisNodeOutput,
    VcKernel,
    induced_via_mcis,
    mcis_program,
    mcis_round_envelope,
    vc_kernel_program,
)
from .core import EquivalenceClassTable, McisCandidate, McisCounters, McisPartitioning, McisPlan

__all__ = [
    "MCIS_ROUND_CONSTANT",
    "DisconnectedTopology",
    "InfeasibleBudget",
    "McisNodeOutput",
    "VcKernel",
    "induced_via_mcis",
    "mcis_program",
    "mcis_round_envelope",
    "vc_kernel_program",
    "mcis_centralized",
    "mcis_with_counters",
    "EquivalenceClassTable",
    "McisCandidate",
    "McisCounters",
    "McisPartitioning",
    "McisPlan",
]
