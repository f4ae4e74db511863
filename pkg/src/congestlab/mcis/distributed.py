"""Distributed MCIS in CONGEST, parameterized by vertex cover number.

Every node ends up knowing the cover of the topology, the edges inside it
and, one G partitioning at a time, the sizes of the independent classes.
With that and the pattern graph every node runs the same enumeration, so
the only traffic is the cover computation, class sizes and rank offsets.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..graphs import Graph, PatternGraph, as_graph
from ..sim import GeneratorProgram, NodeContext, SimModel, SimulationError, count_bits, decode_uint, encode_uint
from ..structure import min_vertex_cover
from ..tree import (
    TreeInfo,
    bfs_phase,
    convergecast_phase,
    downcast_phase,
    height_phase,
    upcast_items_phase,
)
from .core import (
    CoverView,
    McisCounters,
    McisPlan,
    best_for_g_partition,
    h_partition_tables,
    iter_partitionings,
    local_image,
)

__all__ = [
    "DisconnectedTopology",
    "InfeasibleBudget",
    "VcKernel",
    "VcKernelOutput",
    "vc_kernel_phase",
    "vc_kernel_program",
    "McisNodeOutput",
    "McisProgram",
    "mcis_program",
    "InducedViaMcisProgram",
    "induced_via_mcis",
    "mcis_round_envelope",
    "MCIS_ROUND_CONSTANT",
]

# measured rounds stay below this multiple of the envelope on every test pair
MCIS_ROUND_CONSTANT = 1


class InfeasibleBudget(SimulationError):
    """The vertex cover number exceeds the budget the program was given."""


class DisconnectedTopology(SimulationError):
    """The BFS tree spans fewer nodes than ``n``: the topology is disconnected
    (or nodes were handed a loose upper bound instead of ``n``)."""


@dataclass(frozen=True)
class VcKernel:
    high_degree_nodes: frozenset[int]
    residual_edges: tuple[tuple[int, int], ...]
    tau_bound: int


@dataclass(frozen=True)
class VcKernelOutput:
    cover: frozenset[int]
    kernel: VcKernel | None  # only the root holds the gathered kernel
    tree_depth: int


def mcis_round_envelope(tau: int) -> int:
    tau = max(1, tau)
    return 18 ** tau * tau ** (tau + 1) * 2 ** (tau * tau + 1)


def _pair(u: int, v: int, width: int) -> int:
    return u << width | v


def _unpair(x: int, width: int) -> tuple[int, int]:
    return x >> width, x & ((1 << width) - 1)


def _broadcast_total(ctx: NodeContext, tree: TreeInfo, values, width: int, combine=None):
    if combine is None:
        acc, per_child = yield from convergecast_phase(ctx, tree, values, width)
    else:
        acc, per_child = yield from convergecast_phase(ctx, tree, values, width, combine)
    got = yield from downcast_phase(ctx, tree, acc if tree.is_root else None, len(values), width)
    return got, per_child


def _gather_and_spread(ctx: NodeContext, tree: TreeInfo, items, width: int, total: int):
    gathered = yield from upcast_items_phase(ctx, tree, items, width, total)
    got = yield from downcast_phase(ctx, tree, gathered, total, width)
    return got


def vc_kernel_phase(ctx: NodeContext, tree: TreeInfo, tau: int):
    """Minimum vertex cover of the topology, learned by every node.

    Nodes of degree above ``tau`` are forced into any cover of size ``tau``.
    The edges between the remaining nodes form a kernel of at most ``tau^2``
    edges, which the root gathers and solves by branching.
    """
    width = ctx.id_bits
    forced = ctx.degree > tau
    inbox = yield ("1" if forced else "0")
    forced_nbrs = {ctx.neighbor_ids[p] for p, m in inbox.items() if m == "1"}
    my_edges = [] if forced else [
        u for u in ctx.neighbor_ids if u > ctx.node_id and u not in forced_nbrs
    ]
    cap = tau * tau + 1
    totals, _ = yield from _broadcast_total(
        ctx, tree, [min(len(my_edges), cap), int(forced)], ctx.bandwidth_bits,
        lambda a, b: min(a + b, cap),
    )
    n_edges, n_forced = totals
    if n_forced > tau or n_edges > tau * tau:
        raise InfeasibleBudget(
            f"node {ctx.node_id}: kernel exceeds budget {tau} "
            f"({n_forced} forced nodes, {n_edges} residual edges, both capped)", node=ctx.node_id,
        )
    items = [_pair(u, u, width) for u in ([ctx.node_id] if forced else [])]
    items += [_pair(ctx.node_id, u, width) for u in my_edges]
    gathered = yield from upcast_items_phase(ctx, tree, items, 2 * width, n_edges + n_forced)
    kernel = None
    status = cover_ids = None
    if tree.is_root:
        pairs = [_unpair(x, width) for x in gathered]
        high = frozenset(u for u, v in pairs if u == v)
        edges = tuple(sorted((u, v) for u, v in pairs if u != v))
        kernel = VcKernel(high, edges, tau)
        rest = min_vertex_cover(Graph.from_edges(ctx.n_upper_bound, edges), tau - len(high))
        cover_ids = sorted(high | rest) if rest is not None else None
        status = [len(cover_ids) if cover_ids is not None else tau + 1]
    (size,) = yield from downcast_phase(ctx, tree, status, 1, width)
    if size > tau:
        raise InfeasibleBudget(
            f"node {ctx.node_id}: kernel needs more than {tau} cover nodes", node=ctx.node_id
        )
    cover = yield from downcast_phase(
        ctx, tree, cover_ids if tree.is_root else None, size, width
    )
    return frozenset(cover), kernel


def _tree_setup(ctx: NodeContext, tau: int):
    # a connected graph with a cover of size tau has diameter at most 2 tau
    tree = yield from bfs_phase(ctx, max(1, 2 * tau), InfeasibleBudget)
    tree = yield from height_phase(ctx, tree)
    width = count_bits(ctx.n_upper_bound)
    acc, _ = yield from convergecast_phase(ctx, tree, [1], width)
    spanned = yield from downcast_phase(ctx, tree, acc if tree.is_root else None, 1, width)
    if spanned[0] != ctx.n_upper_bound:
        raise DisconnectedTopology(
            f"node {ctx.node_id}: tree spans {spanned[0]} of {ctx.n_upper_bound} nodes", node=ctx.node_id
        )
    return tree


class VcKernelProgram(GeneratorProgram):
    message_words = 2

    def __init__(self, tau_bound: int) -> None:
        if tau_bound < 0:
            raise ValueError("tau_bound must be non-negative")
        self.tau_bound = tau_bound

    def body(self, ctx: NodeContext):
        tree = yield from _tree_setup(ctx, self.tau_bound)
        cover, kernel = yield from vc_kernel_phase(ctx, tree, self.tau_bound)
        return VcKernelOutput(cover, kernel, tree.depth)


def vc_kernel_program(tau_bound: int) -> VcKernelProgram:
    return VcKernelProgram(tau_bound)


@dataclass(frozen=True)
class McisNodeOutput:
    node: int
    image: int | None
    size: int
    tau_g: int
    tau_h: int
    tree_depth: int
    counters: dict

    def line(self) -> str:
        return f"{self.node} -> {'BOT' if self.image is None else self.image}"


def _h_cover(h: Graph, tau: int, node: int) -> frozenset[int]:
    cover = min_vertex_cover(h, tau)
    if cover is None:
        raise InfeasibleBudget(f"node {node}: the pattern has no cover of size {tau}", node=node)
    return frozenset(cover)


class McisProgram(GeneratorProgram):
    """Each node outputs its image under a maximum common induced subgraph
    mapping into ``h``, or ``None`` for the bottom value."""

    message_words = 2

    def __init__(self, h: Graph | PatternGraph, tau_bound: int) -> None:
        if tau_bound < 0:
            raise ValueError("tau_bound must be non-negative")
        self.h = as_graph(h)
        self.tau_bound = tau_bound
        self._h_cache: dict[int, tuple] = {}

    def model_for(self, kind, n: int) -> SimModel:
        # images are pattern identifiers, so words are sized for both graphs
        return SimModel.for_graph(kind, max(n, self.h.node_count + 1), self.message_words)

    def _h_side(self, node: int):
        key = self.tau_bound
        if key not in self._h_cache:
            cover = _h_cover(self.h, self.tau_bound, node)
            hv = CoverView.of(self.h, cover)
            self._h_cache[key] = (cover, hv, h_partition_tables(self.h, hv.cover))
        return self._h_cache[key]

    def body(self, ctx: NodeContext):
        tau = self.tau_bound
        cover_h, hv, h_tables = self._h_side(ctx.node_id)
        tree = yield from _tree_setup(ctx, tau)
        cover, _ = yield from vc_kernel_phase(ctx, tree, tau)
        width = ctx.id_bits
        cwidth = count_bits(ctx.n_upper_bound)
        in_cover = ctx.node_id in cover

        # edges inside the cover, owned by the lower endpoint
        mine = [u for u in ctx.neighbor_ids if in_cover and u in cover and u > ctx.node_id]
        (n_edges,), _ = yield from _broadcast_total(ctx, tree, [len(mine)], cwidth)
        got = yield from _gather_and_spread(
            ctx, tree, [_pair(ctx.node_id, u, width) for u in mine], 2 * width, n_edges
        )
        gv = CoverView(tuple(sorted(cover)), frozenset(_unpair(x, width) for x in got))

        counters = McisCounters()
        best: McisPlan | None = None
        best_split = None
        nbrs = set(ctx.neighbor_ids)
        for part_g in iter_partitionings(gv.cover):
            length = 1 << len(part_g.kept)
            own = [0] * length
            if not in_cover:
                own[part_g.signature_index(nbrs)] = 1
            sizes, per_child = yield from _broadcast_total(ctx, tree, own, cwidth)
            plan = best_for_g_partition(gv, part_g, tuple(sizes), hv, h_tables, counters)
            if plan is not None and (best is None or plan.size > best.size):
                best, best_split = plan, (own, per_child)
        assert best is not None and best_split is not None

        # ranks inside each class follow the DFS order of the tree
        own, per_child = best_split
        children = tree.children

        def for_child(j: int, value: int, child: int) -> int:
            before = sum(per_child[c][j] for c in children if c < child)
            return value + own[j] + before

        length = len(own)
        base = yield from downcast_phase(
            ctx, tree, [0] * length if tree.is_root else None, length, cwidth, for_child
        )
        h_members = next(t for t in h_tables if t.part == best.part_h).members
        if in_cover:
            image = local_image(best, h_members, ctx.node_id, None, 0)
        else:
            sig = best.part_g.signature_index(nbrs)
            image = local_image(best, h_members, ctx.node_id, sig, base[sig])

        # neighbours compare images against the edges of h
        img_width = count_bits(self.h.node_count + 1)
        if img_width > ctx.bandwidth_bits:
            raise SimulationError("pattern identifiers do not fit in one message")
        inbox = yield encode_uint(0 if image is None else image + 1, img_width)
        if image is not None:
            for m in inbox.values():
                other = decode_uint(m) - 1
                if other >= 0 and (other == image or not self.h.has_edge(image, other)):
                    raise SimulationError(
                        f"node {ctx.node_id}: neighbour image breaks the isomorphism",
                        node=ctx.node_id,
                    )
        return McisNodeOutput(
            ctx.node_id, image, best.size, len(cover), len(cover_h), tree.depth,
            counters.as_record(),
        )


def mcis_program(h: Graph | PatternGraph, tau_bound: int) -> McisProgram:
    return McisProgram(h, tau_bound)


@dataclass(frozen=True)
class McisReport:
    report: bool
    size: int

    def line(self) -> str:
        return f"report:{int(self.report)}"

    def __bool__(self) -> bool:
        return self.report


class InducedViaMcisProgram(GeneratorProgram):
    """Reports whether ``h`` occurs induced: the common induced subgraph of
    the topology and ``h`` then covers all of ``h``."""

    message_words = 2

    def __init__(self, h: Graph | PatternGraph, tau_bound: int) -> None:
        self.h = as_graph(h)
        self.k = self.h.node_count
        self.inner = McisProgram(self.h, tau_bound + self.k)

    def model_for(self, kind, n: int) -> SimModel:
        return self.inner.model_for(kind, n)

    def body(self, ctx: NodeContext):
        if ctx.n_upper_bound < self.k:
            raise ValueError("the topology has fewer nodes than the pattern")
        out = yield from self.inner.body(ctx)
        return McisReport(out.size == self.k, out.size)


def induced_via_mcis(h: Graph | PatternGraph, tau_bound: int) -> InducedViaMcisProgram:
    return InducedViaMcisProgram(h, tau_bound)
