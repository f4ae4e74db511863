"""Distributed induced-subgraph detection on bounded-degeneracy graphs."""

from __future__ import annotations

from typing import Any, Mapping

from .coloring_family import ColoringFamily, build_coloring_family
from .orientation import (
    NodeOrientation,
    OrientationAssignment,
    assemble_orientation,
    orientation_program,
    peel_threshold,
    phase_bound,
)
from .p2 import induced_p2_program
from .proper import (
    LabeledTree,
    NotATree,
    label_tree_bottom_up,
    proper_copy_oracle,
    proper_induced_tree_program,
)
from .tree_detect import (
    DetectionOutput,
    induced_tree_derandomized,
    induced_tree_random,
    trial_count,
)

__all__ = [
    "ColoringFamily",
    "build_coloring_family",
    "NodeOrientation",
    "OrientationAssignment",
    "assemble_orientation",
    "orientation_program",
    "peel_threshold",
    "phase_bound",
    "induced_p2_program",
    "LabeledTree",
    "NotATree",
    "label_tree_bottom_up",
    "proper_copy_oracle",
    "proper_induced_tree_program",
    "DetectionOutput",
    "induced_tree_derandomized",
    "induced_tree_random",
    "trial_count",
    "verdict",
    "verdict_lines",
]


def verdict(outputs: Mapping[int, Any]) -> bool:
    """OR of the per-node reports."""
    return any(bool(o) for o in outputs.values())


def verdict_lines(outputs: Mapping[int, Any]) -> list[str]:
    return [f"{v} report:{int(bool(outputs[v]))}" for v in sorted(outputs)]
