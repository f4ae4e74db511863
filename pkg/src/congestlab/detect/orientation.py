"""Bounded out-degree acyclic orientations by layered peeling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

from ..graphs import Graph, GraphError
from ..sim import GeneratorProgram, NodeContext, NonTermination

__all__ = [
    "OrientationAssignment",
    "NodeOrientation",
    "OrientationProgram",
    "orientation_program",
    "peel_threshold",
    "phase_bound",
    "orientation_phase",
    "guess_count",
    "assemble_orientation",
]


@dataclass(frozen=True)
class NodeOrientation:
    layer: int
    out_neighbors: frozenset[int]


@dataclass(frozen=True)
class OrientationAssignment:
    """Acyclic orientation given by a layer per node (ties broken by id)."""

    layer: tuple[int, ...]
    out: tuple[frozenset[int], ...]
    alpha: int
    epsilon: float

    @classmethod
    def from_layers(cls, g: Graph, layer, alpha: int | None = None, epsilon: float = 0.0):
        layer = tuple(layer)
        if len(layer) != g.node_count:
            raise GraphError("one layer per node required")
        out = tuple(
            frozenset(u for u in g.neighbors(v) if (layer[u], u) > (layer[v], v))
            for v in g.nodes()
        )
        if alpha is None:
            alpha = max((len(o) for o in out), default=0)
        return cls(layer, out, alpha, epsilon)

    def arcs(self) -> list[tuple[int, int]]:
        return sorted((v, u) for v, o in enumerate(self.out) for u in o)

    def max_out_degree(self) -> int:
        return max((len(o) for o in self.out), default=0)

    def phases(self) -> int:
        return max(self.layer, default=0)

    def is_acyclic(self) -> bool:
        # arcs respect a strict order, so checking that is enough
        return all((self.layer[u], u) > (self.layer[v], v) for v, u in self.arcs())

    def orients(self, g: Graph) -> bool:
        seen = {(min(u, v), max(u, v)) for u, v in self.arcs()}
        return len(seen) == len(self.arcs()) == g.m and seen == set(g.edges)

    def is_valid(self, g: Graph) -> bool:
        return self.orients(g) and self.is_acyclic() and self.max_out_degree() <= self.alpha


def peel_threshold(d: int, epsilon: float) -> int:
    return math.floor((2 + epsilon) * d)


def phase_bound(n: int, epsilon: float) -> int:
    """Phases after which peeling with threshold (2+eps)d has removed every node."""
    if n <= 1:
        return 1
    return math.ceil(math.log(n) / math.log((2 + epsilon) / 2)) + 1


def _peel(ctx: NodeContext, live: set[int], threshold: int, phases: int, start_layer: int,
          pad: bool):
    """Run ``phases`` peeling rounds; returns (layer, out) or (None, live).

    With ``pad`` a node that joins stays silent until the block ends.
    """
    for p in range(1, phases + 1):
        joining = len(live) <= threshold
        inbox = yield ("1" if joining else None)
        joined_now = {ctx.neighbor_ids[port] for port in inbox}
        if joining:
            out = frozenset(u for u in live if u not in joined_now or u > ctx.node_id)
            for _ in range(phases - p if pad else 0):
                yield None
            return start_layer + p, out
        live -= joined_now
    return None, live


def guess_count(n: int, epsilon: float) -> int:
    """Doubling guesses after which the peel threshold exceeds every degree."""
    guess, count = 1, 1
    while peel_threshold(guess, epsilon / 2) < n - 1:
        guess *= 2
        count += 1
    return count


def orientation_phase(ctx: NodeContext, d: int | None, epsilon: float, synchronize: bool = False):
    """Compute this node's layer and out-neighbours.

    With ``d`` known the threshold is ``floor((2+eps)d)``.  Without it, guesses
    ``1, 2, 4, ...`` are tried in blocks of a fixed number of phases with
    threshold ``floor((2+eps/2)*guess)``, which stays below ``(4+eps)d``.

    With ``synchronize`` every node leaves the phase in the same round: after
    the phase bound, or, for unknown ``d``, after the last guess that can be
    needed for ``N`` nodes.
    """
    live = set(ctx.neighbor_ids)
    if d is not None:
        bound = phase_bound(ctx.n_upper_bound, epsilon)
        layer, out = yield from _peel(ctx, live, peel_threshold(d, epsilon), bound, 0, synchronize)
        if layer is None:
            raise NonTermination(
                f"node {ctx.node_id} still unpeeled after {bound} phases; "
                f"the graph is not {d}-degenerate",
                node=ctx.node_id,
            )
        return NodeOrientation(layer, out)
    half = epsilon / 2
    bound = phase_bound(ctx.n_upper_bound, half)
    blocks = guess_count(ctx.n_upper_bound, epsilon)
    guess, offset, block = 1, 0, 1
    while True:
        layer, rest = yield from _peel(
            ctx, live, peel_threshold(guess, half), bound, offset, synchronize
        )
        if layer is not None:
            for _ in range((blocks - block) * bound if synchronize else 0):
                yield None
            return NodeOrientation(layer, rest)
        live = rest
        offset += bound
        guess *= 2
        block += 1


class OrientationProgram(GeneratorProgram):
    message_words = 1

    def __init__(self, d: int | None, epsilon: float) -> None:
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if d is not None and d < 0:
            raise ValueError("d must be non-negative")
        self.d = d
        self.epsilon = epsilon

    @property
    def alpha(self) -> int | None:
        return peel_threshold(self.d, self.epsilon) if self.d is not None else None

    def body(self, ctx: NodeContext):
        result = yield from orientation_phase(ctx, self.d, self.epsilon)
        return result


def orientation_program(d: int | None = None, epsilon: float = 1.0) -> OrientationProgram:
    return OrientationProgram(d, epsilon)


def assemble_orientation(
    g: Graph, outputs: Mapping[int, Any], alpha: int | None = None, epsilon: float = 0.0
) -> OrientationAssignment:
    """Collect per-node outputs into one assignment (checked against ``g``)."""
    layers = tuple(outputs[v].layer for v in g.nodes())
    sigma = OrientationAssignment.from_layers(g, layers, alpha, epsilon)
    for v in g.nodes():
        if sigma.out[v] != outputs[v].out_neighbors:
            raise GraphError(f"node {v} reported out-neighbours inconsistent with the layers")
    return sigma
