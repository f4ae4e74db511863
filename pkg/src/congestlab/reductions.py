"""Reductions from clique detection to pattern detection.

``reduce_clique_to_pattern`` turns a graph ``g`` into ``G*`` so that ``g``
has an ``s``-clique exactly when ``G*`` contains the pattern ``h``.  The
first set ``C_1`` of a minimum ``s``-clique cover of ``h`` is blown up into
``|C_1|`` independent copies of ``V_G``; every other pattern node appears
once.  Node ids: copy ``(v, i)`` is ``pos(i) * n + v`` where ``pos`` is the
position of ``i`` in ``C_1``; pattern copy ``j*`` follows in ascending ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Any

from .graphs import Coloring, CliqueCover, Graph, GraphError, PatternGraph, as_graph
from .instances import LowerBoundInstance, PredicateSpec, crossing_edges
from .oracles import CLIQUE_COVER_MAX, check_clique_cover, min_s_clique_cover, oracle_subgraph, s_cliques
from .sim import (
    GeneratorProgram,
    ModelKind,
    NodeContext,
    NodeProgram,
    SimModel,
)
from .structure import complement
from .virtual import VirtualHostProgram, VirtualNode, VirtualOutputs, Wiring

__all__ = [
    "InvalidCover",
    "ReducedInstance",
    "reduce_clique_to_pattern",
    "ReductionWiring",
    "GatherDetectProgram",
    "simulate_reduction_cc",
    "reduction_verdict",
    "complement_instance",
    "lift_lower_bound_family",
    "lifted_cut_bound",
    "multicolored_blowup",
    "strip_same_color_edges",
    "LowerBoundInstance",
]


class InvalidCover(GraphError):
    pass


@dataclass(frozen=True)
class ReducedInstance:
    graph: Graph
    provenance: tuple[tuple, ...]  # ("copy", v, i) or ("pattern", j)
    pattern: PatternGraph
    cover: CliqueCover
    source_n: int

    @property
    def c1(self) -> tuple[int, ...]:
        return tuple(self.cover.sets[0])

    def node_of_copy(self, v: int, i: int) -> int:
        return self.c1.index(i) * self.source_n + v

    def rule_problems(self, g: Graph) -> list[str]:
        """Re-derive every edge of ``G*`` from ``g``, ``h`` and ``C_1``."""
        h = self.pattern.graph
        c1 = set(self.c1)
        problems = []
        for a, b in combinations(range(self.graph.node_count), 2):
            pa, pb = self.provenance[a], self.provenance[b]
            if pa[0] == "copy" and pb[0] == "copy":
                want = h.has_edge(pa[2], pb[2]) and g.has_edge(pa[1], pb[1])
            elif pa[0] == "copy" or pb[0] == "copy":
                cp, pt = (pa, pb) if pa[0] == "copy" else (pb, pa)
                want = h.has_edge(cp[2], pt[1])
            else:
                want = h.has_edge(pa[1], pb[1])
            if want != self.graph.has_edge(a, b):
                problems.append(f"edge {a}-{b} ({pa}, {pb}) should be {'present' if want else 'absent'}")
        for i in c1:
            copies = [self.node_of_copy(v, i) for v in range(self.source_n)]
            if not self.graph.is_independent(copies):
                problems.append(f"copies of pattern node {i} are not independent")
        return problems


def _validate_cover(h: Graph, s: int, cover: CliqueCover) -> None:
    if cover.s != s:
        raise InvalidCover(f"cover is for s={cover.s}, not {s}")
    if not cover.sets or not cover.sets[0]:
        raise InvalidCover("cover must have a non-empty first set")
    if not s_cliques(h, s):
        raise InvalidCover(f"pattern has no {s}-clique")
    problems = check_clique_cover(h, cover)
    if problems:
        raise InvalidCover("; ".join(problems))
    # minimality is only needed for the converse direction; checked where affordable
    if h.node_count <= CLIQUE_COVER_MAX:
        best = min_s_clique_cover(h, s)
        if best.t < cover.t:
            raise InvalidCover(f"cover has {cover.t} sets, a cover with {best.t} exists")


def _reduced_edges(h: Graph, c1: tuple[int, ...], n: int, g_edges):
    """Edges of ``G*`` given the edges of ``g`` (any iterable of pairs)."""
    pos = {i: p for p, i in enumerate(c1)}
    rest = [j for j in h.nodes() if j not in pos]
    star = {j: len(c1) * n + r for r, j in enumerate(rest)}
    edges = []
    for u, v in g_edges:
        for i in c1:
            for j in c1:
                if h.has_edge(i, j):
                    edges.append((pos[i] * n + u, pos[j] * n + v))
    for i in c1:
        for j in rest:
            if h.has_edge(i, j):
                edges.extend((pos[i] * n + v, star[j]) for v in range(n))
    for a, b in combinations(rest, 2):
        if h.has_edge(a, b):
            edges.append((star[a], star[b]))
    return edges, star


def reduce_clique_to_pattern(g: Graph, h: PatternGraph | Graph, s: int,
                             cover: CliqueCover | None = None) -> ReducedInstance:
    hg = as_graph(h)
    if cover is None:
        if not s_cliques(hg, s):
            raise InvalidCover(f"pattern has no {s}-clique")
        cover = min_s_clique_cover(hg, s)
    _validate_cover(hg, s, cover)
    c1 = tuple(cover.sets[0])
    n = g.node_count
    edges, star = _reduced_edges(hg, c1, n, g.edges)
    prov: list[tuple] = [("copy", v, i) for i in c1 for v in range(n)]
    prov += [("pattern", j) for j in sorted(star)]
    roles = [f"copy[{p[1]},{p[2]}]" if p[0] == "copy" else f"star[{p[1]}]" for p in prov]
    graph = Graph.from_edges(len(prov), edges, roles)
    pattern = h if isinstance(h, PatternGraph) else PatternGraph(h)
    return ReducedInstance(graph, tuple(prov), pattern, cover, n)


class ReductionWiring(Wiring):
    """Host ``v`` simulates the copies ``(v, i)`` and, for ``v`` below
    ``|V_H \\ C_1|``, the pattern copy of rank ``v``.  The simulated network
    is a congested clique over ``G*``."""

    def __init__(self, h: Graph, c1: tuple[int, ...]) -> None:
        self.h = h
        self.c1 = tuple(c1)
        self.rest = tuple(j for j in h.nodes() if j not in self.c1)
        self.expansion = len(self.c1) + 1

    def virtual_count(self, host_n: int) -> int:
        return len(self.c1) * host_n + len(self.rest)

    def hosted(self, host: int, host_n: int) -> list[int]:
        ids = [p * host_n + host for p in range(len(self.c1))]
        if host < len(self.rest):
            ids.append(len(self.c1) * host_n + host)
        return ids

    def owner(self, vid: int, host_n: int) -> int:
        base = len(self.c1) * host_n
        return vid % host_n if vid < base else vid - base

    def virtual_nodes(self, ctx: NodeContext, host_n: int) -> list[VirtualNode]:
        if host_n < len(self.rest):
            raise GraphError("fewer hosts than pattern nodes outside C_1")
        total = self.virtual_count(host_n)
        # only the host's own edges are used, so it sees just its slice of G*
        local_edges = [(ctx.node_id, u) for u in ctx.input_neighbor_ids]
        edges, star = _reduced_edges(self.h, self.c1, host_n, local_edges)
        adj: dict[int, set[int]] = {}
        for a, b in edges:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        out = []
        for vid in self.hosted(ctx.node_id, host_n):
            if vid < len(self.c1) * host_n:
                nbrs = adj.get(vid, set())
            else:
                # a pattern copy's edges do not depend on g at all
                j = self.rest[vid - len(self.c1) * host_n]
                nbrs = _pattern_copy_neighbors(self.h, self.c1, host_n, j, star)
            everyone = tuple(w for w in range(total) if w != vid)
            out.append(VirtualNode(vid, everyone, None, tuple(sorted(nbrs))))
        return out


def _pattern_copy_neighbors(h: Graph, c1, n: int, j: int, star: dict[int, int]) -> set[int]:
    nbrs = set()
    for p, i in enumerate(c1):
        if h.has_edge(i, j):
            nbrs.update(p * n + v for v in range(n))
    nbrs.update(star[b] for b in star if b != j and h.has_edge(j, b))
    return nbrs


@dataclass(frozen=True)
class GatherOutput:
    report: bool

    def __bool__(self) -> bool:
        return self.report


class GatherDetectProgram(GeneratorProgram):
    """Congested-clique pattern detection by full gathering: every node sends
    its adjacency row to everyone, then the lowest id searches locally."""

    message_words = 1

    def __init__(self, h: Graph | PatternGraph, induced: bool = True) -> None:
        self.h = as_graph(h)
        self.induced = induced

    def model_for(self, kind=ModelKind.CONGESTED_CLIQUE, n: int = 2) -> SimModel:
        return SimModel.for_graph(kind, n, self.message_words)

    def body(self, ctx: NodeContext):
        n = ctx.n_upper_bound
        b = ctx.bandwidth_bits
        mine = set(ctx.input_neighbor_ids)
        row = "".join("1" if u in mine else "0" for u in range(n))
        rows: dict[int, list[str]] = {u: [] for u in ctx.neighbor_ids}
        for start in range(0, n, b):
            inbox = yield row[start:start + b]
            for port, bits in inbox.items():
                rows[ctx.neighbor_ids[port]].append(bits)
        if ctx.node_id != min([ctx.node_id, *ctx.neighbor_ids]):
            return GatherOutput(False)
        edges = {(ctx.node_id, u) for u in mine}
        for u, chunks in rows.items():
            full = "".join(chunks)
            edges.update((u, w) for w, bit in enumerate(full) if bit == "1")
        g = Graph.from_edges(n, edges)
        found = oracle_subgraph(g, self.h, self.induced, override_scale=True)
        return GatherOutput(found is not None)


class ReductionSimulation(NodeProgram):
    """``s``-clique detection in the congested clique by running a pattern
    detector on the simulated ``G*``."""

    def __init__(self, h: Graph, s: int, inner: NodeProgram, cover: CliqueCover) -> None:
        self.h = h
        self.s = s
        self.inner = inner
        self.cover = cover
        self.wiring = ReductionWiring(h, tuple(cover.sets[0]))
        self.message_words = inner.message_words
        self._hosts: dict[int, VirtualHostProgram] = {}

    @property
    def overhead_bound(self) -> int:
        return self.wiring.expansion ** 2

    def _host(self, n: int) -> VirtualHostProgram:
        if n not in self._hosts:
            self._hosts[n] = VirtualHostProgram(self.inner, self.wiring, n)
        return self._hosts[n]

    def model_for(self, kind=ModelKind.CONGESTED_CLIQUE, n: int = 2) -> SimModel:
        return self._host(n).model_for(kind, n)

    def init(self, ctx: NodeContext) -> Any:
        host = self._host(ctx.n_upper_bound)
        return host, host.init(ctx)

    def on_round(self, state, inbox):
        host, inner_state = state
        step = host.on_round(inner_state, inbox)
        return step._replace(state=(host, step.state))


def simulate_reduction_cc(h: Graph | PatternGraph, s: int, inner: NodeProgram | None = None,
                          cover: CliqueCover | None = None) -> ReductionSimulation:
    """Host ``v`` builds its simulated nodes from its own edges and ``h``.
    Requires ``N`` equal to the host count."""
    hg = as_graph(h)
    if cover is None:
        if not s_cliques(hg, s):
            raise InvalidCover(f"pattern has no {s}-clique")
        cover = min_s_clique_cover(hg, s)
    _validate_cover(hg, s, cover)
    return ReductionSimulation(hg, s, inner or GatherDetectProgram(hg), cover)


def reduction_verdict(outputs: dict[int, VirtualOutputs]) -> bool:
    return any(bool(o) for out in outputs.values() for o in out.outputs.values())


def complement_instance(g: Graph, h: PatternGraph | Graph) -> tuple[Graph, PatternGraph]:
    return complement(g), PatternGraph(complement(as_graph(h)))


def lifted_cut_bound(h: Graph, c1, cut_size: int, side1_size: int) -> int:
    """Cut of the lifted instance: each cut edge is copied once per ordered
    pair of adjacent nodes in ``C_1``, and each pattern copy adjacent to
    ``i`` in ``C_1`` sees every side-1 copy ``(v, i)``."""
    c1 = set(c1)
    inside = sum(1 for a, b in h.edges if a in c1 and b in c1)
    across = sum(1 for a, b in h.edges if (a in c1) != (b in c1))
    return 2 * inside * cut_size + across * side1_size


def lift_lower_bound_family(inst: LowerBoundInstance, h: PatternGraph | Graph,
                            cover: CliqueCover | None = None,
                            induced: bool = True) -> LowerBoundInstance:
    """Turn a lower-bound instance for ``s``-cliques into one for ``h``."""
    s = inst.predicate.pattern.k
    if inst.predicate.pattern.graph != Graph.from_edges(s, combinations(range(s), 2)):
        raise InvalidCover("lifting needs an instance whose predicate is clique existence")
    red = reduce_clique_to_pattern(inst.graph, h, s, cover)
    c1 = red.c1
    v0 = frozenset(
        a for a, p in enumerate(red.provenance) if p[0] == "pattern" or p[1] in inst.v0
    )
    v1 = frozenset(red.graph.nodes()) - v0
    hg = red.pattern.graph
    controlled = {}
    for (u, v), ctl in inst.controlled.items():
        for i in c1:
            for j in c1:
                if hg.has_edge(i, j):
                    a, b = red.node_of_copy(u, i), red.node_of_copy(v, j)
                    controlled[(min(a, b), max(a, b))] = ctl
    return LowerBoundInstance(
        graph=red.graph,
        v0=v0,
        v1=v1,
        cut=crossing_edges(red.graph, v0),
        disj=inst.disj,
        predicate=PredicateSpec(red.pattern, induced, False, "lifted"),
        expected=inst.expected,
        declared_cut=lifted_cut_bound(hg, c1, len(inst.cut), len(inst.v1)),
        controlled=controlled,
        family=f"lifted:{inst.family}",
        params={"source": inst.family, "s": s, "c1": list(c1)},
    )


def multicolored_blowup(g: Graph, k: int, target: str = "clique") -> tuple[Graph, Coloring]:
    """``k`` copies per node; copy ``i`` of ``v`` has id ``v*k + i - 1`` and color ``i``.

    Copies of different nodes are joined when the nodes are adjacent; copies
    of one node are independent for ``target="clique"`` and form a clique
    for ``target="independent-set"``.
    """
    if k < 1:
        raise GraphError("k must be positive")
    if target not in ("clique", "independent-set"):
        raise GraphError(f"unknown target {target!r}")
    edges = [(u * k + i, v * k + j) for u, v in g.edges for i in range(k) for j in range(k)]
    if target == "independent-set":
        edges += [(v * k + i, v * k + j) for v in g.nodes() for i, j in combinations(range(k), 2)]
    roles = [f"{v}_{i + 1}" for v in g.nodes() for i in range(k)]
    blown = Graph.from_edges(k * g.node_count, edges, roles)
    chi = Coloring(tuple(i + 1 for _ in g.nodes() for i in range(k)))
    assert blown.node_count == k * g.node_count
    return blown, chi


def strip_same_color_edges(g: Graph, chi: Coloring) -> Graph:
    chi.check_carrier(g)
    return Graph.from_edges(
        g.node_count, [(u, v) for u, v in g.edges if chi[u] != chi[v]], g.roles
    )
