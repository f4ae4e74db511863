"""Labelled pattern trees and the proper-copy check.

A copy of a labelled tree is *proper* for an orientation and a coloring when
the copy node playing label ``i`` has color ``i`` and every out-neighbour of
a copy node that lies outside the copy has color 0.

The distributed check runs with 1-bit confirmations.  A node ``v`` of color
``i`` is *valid* when

* each nonzero-colored out-neighbour of ``v`` has a color adjacent to ``i``
  in the tree, and no two of them share a color, and
* for every child label ``j`` of ``i`` it holds a confirmation from a node of
  color ``j``, and from that very node if ``v`` has an out-neighbour colored ``j``.

A valid node confirms towards a neighbour ``u`` of color ``p(i)`` unless ``v``
has a different out-neighbour of color ``p(i)``.  Out-edges thus pin the
copy's tree partners, which rules out chords and stray out-neighbours.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from ..graphs import Coloring, Graph, GraphError, PatternGraph, ScaleError, as_graph
from ..oracles import ORACLE_MAX_HOST
from ..sim import GeneratorProgram, NodeContext, SimModel
from .orientation import OrientationAssignment

__all__ = [
    "NotATree",
    "LabeledTree",
    "label_tree_bottom_up",
    "proper_copy_oracle",
    "exchange_width",
    "proper_check_phase",
    "ProperCheckProgram",
    "proper_induced_tree_program",
]


class NotATree(GraphError):
    pass


@dataclass(frozen=True)
class LabeledTree:
    """Tree whose nodes carry labels ``1..k``; the root is ``k`` and each
    label is smaller than its parent's."""

    tree: Graph
    label: tuple[int, ...]  # label of each tree node
    parent: dict[int, int | None]  # label -> parent label

    @property
    def k(self) -> int:
        return self.tree.node_count

    def node_of(self, lab: int) -> int:
        return self.label.index(lab)

    def children(self, lab: int) -> list[int]:
        return sorted(c for c, p in self.parent.items() if p == lab)

    def adjacent_labels(self, lab: int) -> set[int]:
        adj = set(self.children(lab))
        if self.parent[lab] is not None:
            adj.add(self.parent[lab])
        return adj

    def subtree(self, lab: int) -> set[int]:
        out = {lab}
        for c in self.children(lab):
            out |= self.subtree(c)
        return out


def label_tree_bottom_up(t: Graph | PatternGraph, root: int = 0) -> LabeledTree:
    """Labels by reverse BFS level from ``root``; lower id first within a level."""
    g = as_graph(t)
    if g.node_count < 1 or not g.is_tree():
        raise NotATree("pattern must be a non-empty tree")
    if not 0 <= root < g.node_count:
        raise NotATree(f"root {root} is not a tree node")
    depth = {root: 0}
    parent_node: dict[int, int | None] = {root: None}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for u in g.sorted_neighbors(v):
            if u not in depth:
                depth[u] = depth[v] + 1
                parent_node[u] = v
                queue.append(u)
    order = sorted(g.nodes(), key=lambda v: (-depth[v], v))
    label = [0] * g.node_count
    for i, v in enumerate(order, 1):
        label[v] = i
    parent = {
        label[v]: (label[parent_node[v]] if parent_node[v] is not None else None)
        for v in g.nodes()
    }
    return LabeledTree(g, tuple(label), parent)


def proper_copy_oracle(
    g: Graph,
    t: LabeledTree,
    sigma: OrientationAssignment,
    chi: Coloring | Sequence[int],
    *,
    override_scale: bool = False,
) -> bool:
    """Exhaustive search for a proper induced copy of ``t``."""
    if g.node_count > ORACLE_MAX_HOST and not override_scale:
        raise ScaleError(f"proper_copy_oracle limited to n <= {ORACLE_MAX_HOST}")
    color = [chi[v] for v in g.nodes()]
    k = t.k
    # place labels from the root down so each new node hangs off its parent
    order = sorted(range(1, k + 1), reverse=True)
    image: dict[int, int] = {}

    def fits(lab: int, v: int) -> bool:
        if color[v] != lab or v in image.values():
            return False
        for other, w in image.items():
            tree_edge = t.parent[lab] == other or t.parent[other] == lab
            if g.has_edge(v, w) != tree_edge:
                return False
        return True

    def rec(i: int) -> bool:
        if i == k:
            copy = set(image.values())
            return all(color[u] == 0 for v in copy for u in sigma.out[v] if u not in copy)
        lab = order[i]
        par = t.parent[lab]
        cands = g.nodes() if par is None else g.neighbors(image[par])
        for v in cands:
            if fits(lab, v):
                image[lab] = v
                if rec(i + 1):
                    return True
                del image[lab]
        return False

    return rec(0)


def exchange_width(k: int) -> int:
    """Bits needed to send a color in ``0..k``."""
    return max(1, math.ceil(math.log2(k + 1)))


def _bit(mask: int, b: int) -> int:
    return (mask >> b) & 1


def _pack(bits: int, width: int) -> str:
    # trial b travels at string position b
    return "".join("1" if bits >> b & 1 else "0" for b in range(width))


def _unpack(s: str) -> int:
    return sum(1 << b for b, ch in enumerate(s) if ch == "1")


def proper_check_phase(
    ctx: NodeContext,
    t: LabeledTree,
    out_neighbors: frozenset[int],
    colors: Sequence[int],
    neighbor_colors: dict[int, Sequence[int]] | None = None,
):
    """Run ``len(colors)`` independent proper checks side by side.

    ``colors[b]`` is this node's color in check ``b``.  Without
    ``neighbor_colors`` the colors are first exchanged bitwise, one bit
    position per round.  Returns a bitmask of the checks in which this node
    (then colored ``k``) accepts a proper copy.
    """
    k = t.k
    batch = len(colors)
    ports = range(ctx.degree)
    if neighbor_colors is None:
        width = exchange_width(k)
        got = [[0] * batch for _ in ports]
        for w in range(width):
            mask = sum(1 << b for b, c in enumerate(colors) if c >> w & 1)
            inbox = yield (_pack(mask, batch) if mask else None)
            for p, msg in inbox.items():
                m = _unpack(msg)
                for b in range(batch):
                    if m >> b & 1:
                        got[p][b] |= 1 << w
        ncol = got
    else:
        ncol = [list(neighbor_colors[u]) for u in ctx.neighbor_ids]
    out_ports = [ctx.port_of(u) for u in sorted(out_neighbors)]
    adjacent = {lab: t.adjacent_labels(lab) for lab in range(1, k + 1)}
    children = {lab: t.children(lab) for lab in range(1, k + 1)}
    confirmed = [0] * ctx.degree  # bitmask per port

    # per check: the unique out-neighbour port of each nonzero color, or a
    # marker that local condition (a) already fails
    out_by_color: list[dict[int, int] | None] = []
    for b in range(batch):
        me = colors[b]
        seen: dict[int, int] | None = {}
        if me:
            for p in out_ports:
                c = ncol[p][b]
                if c == 0:
                    continue
                if c not in adjacent[me] or c in seen:
                    seen = None
                    break
                seen[c] = p
        out_by_color.append(seen)

    def valid(b: int) -> bool:
        me = colors[b]
        seen = out_by_color[b]
        if seen is None:
            return False
        for j in children[me]:
            if j in seen:
                if not _bit(confirmed[seen[j]], b):
                    return False
            elif not any(ncol[p][b] == j and _bit(confirmed[p], b) for p in ports):
                return False
        return True

    for i in range(1, k):
        sends: dict[int, int] = {}
        par = t.parent[i]
        for b in range(batch):
            if colors[b] != i or not valid(b):
                continue
            pinned = out_by_color[b].get(par)  # type: ignore[union-attr]
            for p in ports:
                if ncol[p][b] == par and (pinned is None or pinned == p):
                    sends[p] = sends.get(p, 0) | (1 << b)
        inbox = yield {p: _pack(m, batch) for p, m in sends.items()}
        for p, msg in inbox.items():
            confirmed[p] |= _unpack(msg)
    accept = 0
    for b in range(batch):
        if colors[b] == k and valid(b):
            accept |= 1 << b
    return accept


class ProperCheckProgram(GeneratorProgram):
    """Single proper check.  Local input: ``(color, out_neighbors)``.

    Output: ``True`` at a color-``k`` node that accepts.  Messages after the
    color exchange are single bits.
    """

    message_words = 1

    def __init__(self, t: LabeledTree) -> None:
        self.t = t

    def model_for(self, kind, n):
        return SimModel(kind, 1)

    def body(self, ctx: NodeContext):
        color, out = ctx.local_input
        accept = yield from proper_check_phase(ctx, self.t, frozenset(out), [color])
        return bool(accept)


def proper_induced_tree_program(t: LabeledTree) -> ProperCheckProgram:
    return ProperCheckProgram(t)
