"""BFS tree construction and pipelined tree communication, as reusable phases.

Each phase is a generator meant to be driven with ``yield from`` inside a
:class:`~congestlab.sim.GeneratorProgram` body.  A phase is entered when the
caller is about to emit the outbox of the current round, and it returns
after consuming the inbox that follows its last send.  All phase lengths are
fixed functions of globally known quantities, so nodes stay in lock-step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .sim import (
    GeneratorProgram,
    NodeContext,
    SimulationError,
    decode_uint,
    encode_uint,
)

__all__ = [
    "TreeInfo",
    "bfs_phase",
    "convergecast_phase",
    "downcast_phase",
    "upcast_items_phase",
    "downcast_items_phase",
    "height_phase",
    "BfsOutput",
    "BfsTreeProgram",
    "bfs_tree_program",
]


@dataclass
class TreeInfo:
    root: int
    parent: int | None
    depth: int
    children: tuple[int, ...]
    height: int  # upper bound on the depth of every node, agreed by all nodes

    @property
    def is_root(self) -> bool:
        return self.parent is None


def bfs_phase(ctx: NodeContext, depth_bound: int, mismatch: type[Exception] | None = None):
    """Flood the minimum id for ``depth_bound`` rounds, then register children.

    The minimum id spreads one hop per round, so the round in which a node
    first hears it is its distance to the root.  With ``mismatch`` set, one
    extra round compares roots between neighbours and raises that exception
    when the flood did not reach everyone.
    """
    width = ctx.id_bits
    best = ctx.node_id
    depth = 0
    parent_port: int | None = None
    changed = True
    for r in range(1, depth_bound + 1):
        inbox = yield (encode_uint(best, width) if changed else None)
        changed = False
        if inbox:
            heard = min(decode_uint(m) for m in inbox.values())
            if heard < best:
                best = heard
                depth = r
                parent_port = min(p for p, m in inbox.items() if decode_uint(m) == heard)
                changed = True
    if mismatch is not None:
        inbox = yield encode_uint(best, width)
        if any(decode_uint(m) != best for m in inbox.values()):
            raise mismatch(f"node {ctx.node_id}: BFS flood did not reach the whole graph")
    out = {parent_port: "1"} if parent_port is not None else None
    inbox = yield out
    children = tuple(sorted(ctx.neighbor_ids[p] for p in inbox))
    parent = ctx.neighbor_ids[parent_port] if parent_port is not None else None
    return TreeInfo(best, parent, depth, children, depth_bound)


def convergecast_phase(
    ctx: NodeContext,
    tree: TreeInfo,
    values: Sequence[int],
    width: int,
    combine: Callable[[int, int], int] = lambda a, b: a + b,
):
    """Pipelined aggregation of a vector towards the root.

    Returns ``(subtree_totals, per_child_totals)``; at the root the subtree
    totals are the global totals.  Takes ``len(values) + height`` rounds.
    """
    length = len(values)
    acc = list(values)
    per_child: dict[int, list[int]] = {c: [0] * length for c in tree.children}
    child_ports = {ctx.port_of(c): c for c in tree.children}
    parent_port = ctx.port_of(tree.parent) if tree.parent is not None else None
    offset = tree.height - tree.depth
    for r in range(1, length + tree.height + 1):
        out = None
        j = r - 1 - offset
        if parent_port is not None and 0 <= j < length:
            out = {parent_port: encode_uint(acc[j], width)}
        inbox = yield out
        jc = r - 1 - (offset - 1)
        for p, m in inbox.items():
            c = child_ports.get(p)
            if c is None:
                continue
            if not 0 <= jc < length:
                raise SimulationError(f"node {ctx.node_id}: convergecast out of schedule")
            val = decode_uint(m)
            per_child[c][jc] = val
            acc[jc] = combine(acc[jc], val)
    return acc, per_child


def downcast_phase(
    ctx: NodeContext,
    tree: TreeInfo,
    root_values: Sequence[int] | None,
    length: int,
    width: int,
    for_child: Callable[[int, int, int], int] | None = None,
):
    """Pipelined broadcast of a vector from the root.

    ``for_child(j, value, child)`` may rewrite entry ``j`` per child (used for
    prefix offsets); by default children get the received value.  Returns the
    vector received by this node.  Takes ``length + height`` rounds.
    """
    got: list[int | None] = list(root_values) if tree.is_root else [None] * length
    if tree.is_root and (root_values is None or len(root_values) != length):
        raise SimulationError("root must supply the full vector")
    parent_port = ctx.port_of(tree.parent) if tree.parent is not None else None
    child_ports = [(c, ctx.port_of(c)) for c in tree.children]
    for r in range(1, length + tree.height + 1):
        j = r - 1 - tree.depth
        out = None
        if child_ports and 0 <= j < length:
            value = got[j]
            assert value is not None
            out = {}
            for c, p in child_ports:
                v = for_child(j, value, c) if for_child else value
                out[p] = encode_uint(v, width)
        inbox = yield out
        if parent_port is not None and parent_port in inbox:
            jr = r - tree.depth
            got[jr] = decode_uint(inbox[parent_port])
    if any(v is None for v in got):
        raise SimulationError(f"node {ctx.node_id}: downcast incomplete")
    return [int(v) for v in got]  # type: ignore[arg-type]


def upcast_items_phase(
    ctx: NodeContext, tree: TreeInfo, items: Sequence[int], width: int, total: int
):
    """Pipelined gathering of fixed-width items at the root.

    ``total`` is the global item count (known to everyone).  Each node
    forwards one queued item per round; ``total + height`` rounds suffice.
    Returns the gathered list at the root and ``None`` elsewhere.
    """
    queue = list(items)
    gathered = list(items) if tree.is_root else None
    parent_port = ctx.port_of(tree.parent) if tree.parent is not None else None
    child_ports = {ctx.port_of(c) for c in tree.children}
    for _ in range(total + tree.height):
        out = None
        if parent_port is not None and queue:
            out = {parent_port: encode_uint(queue.pop(0), width)}
        inbox = yield out
        for p in sorted(inbox):
            if p in child_ports:
                item = decode_uint(inbox[p])
                if gathered is not None:
                    gathered.append(item)
                else:
                    queue.append(item)
    if gathered is not None and len(gathered) != total:
        raise SimulationError(f"root gathered {len(gathered)} of {total} items")
    if gathered is None and queue:
        raise SimulationError(f"node {ctx.node_id}: items left undelivered")
    return gathered


def downcast_items_phase(
    ctx: NodeContext, tree: TreeInfo, items: Sequence[int] | None, width: int, total: int
):
    """Stream ``total`` items from the root to every node."""
    return (yield from downcast_phase(ctx, tree, items, total, width))


def height_phase(ctx: NodeContext, tree: TreeInfo):
    """Replace the agreed depth bound by the actual tree height."""
    width = ctx.id_bits
    acc, _ = yield from convergecast_phase(ctx, tree, [tree.depth], width, max)
    got = yield from downcast_phase(ctx, tree, acc if tree.is_root else None, 1, width)
    tree.height = got[0]
    return tree


@dataclass(frozen=True)
class BfsOutput:
    root: int
    parent: int | None
    depth: int
    children: tuple[int, ...]
    total: int | None = None


class BfsTreeProgram(GeneratorProgram):
    """BFS tree rooted at the lowest id.

    ``depth_bound`` defaults to ``N - 1``.  With ``aggregate`` set to
    ``"sum"``, ``"count"`` or ``"max"``, the local inputs (integers) are
    combined at the root over the tree and the result is broadcast back.
    """

    message_words = 1

    def __init__(self, root_rule: str = "lowest-id", depth_bound: int | None = None,
                 aggregate: str | None = None) -> None:
        if root_rule != "lowest-id":
            raise ValueError("only the lowest-id root rule is supported")
        if aggregate not in (None, "sum", "count", "max"):
            raise ValueError(f"unknown aggregate {aggregate!r}")
        self.depth_bound = depth_bound
        self.aggregate = aggregate
        # totals can exceed one identifier width
        self.message_words = 2 if aggregate else 1

    def body(self, ctx: NodeContext) -> Any:
        bound = self.depth_bound if self.depth_bound is not None else max(ctx.n_upper_bound - 1, 0)
        tree = yield from bfs_phase(ctx, bound)
        total = None
        if self.aggregate is not None:
            tree = yield from height_phase(ctx, tree)
            width = ctx.bandwidth_bits
            if self.aggregate == "count":
                mine = 1
            else:
                mine = int(ctx.local_input or 0)
            combine = max if self.aggregate == "max" else (lambda a, b: a + b)
            acc, _ = yield from convergecast_phase(ctx, tree, [mine], width, combine)
            got = yield from downcast_phase(ctx, tree, acc if tree.is_root else None, 1, width)
            total = got[0]
        return BfsOutput(tree.root, tree.parent, tree.depth, tree.children, total)


def bfs_tree_program(root_rule: str = "lowest-id", depth_bound: int | None = None,
                     aggregate: str | None = None) -> BfsTreeProgram:
    return BfsTreeProgram(root_rule, depth_bound, aggregate)
