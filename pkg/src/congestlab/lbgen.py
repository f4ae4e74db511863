"""Lower-bound graph families built from set-disjointness inputs.

Each generator returns a :class:`LowerBoundInstance` whose graph contains
the target pattern exactly when the two inputs share a 1-position.  Node
counts and cut sizes are whatever the construction produces; they are
recorded on the instance rather than taken from a formula.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .graphs import (
    Coloring,
    Graph,
    GraphError,
    PatternGraph,
    ScaleError,
    complete_graph,
    cycle_graph,
    path_graph,
)
from .instances import (
    DisjointnessInput,
    LowerBoundInstance,
    PredicateSpec,
    crossing_edges,
)
from .oracles import iter_embeddings, oracle_multicolored, oracle_subgraph
from .structure import decomposition_from_order, degeneracy, treewidth_exact_small

__all__ = [
    "DisjointnessInput",
    "GadgetCatalog",
    "connector_universe",
    "gen_pattern_Hk",
    "gen_induced_even_cycle",
    "gen_treewidth2_instance",
    "gen_degeneracy2_instance",
    "gen_multicolored_cycle",
    "gen_multicolored_induced_path",
    "gen_clique_gadget_instance",
    "load_instance",
    "verify_lb_instance",
    "LbReport",
    "FAMILIES",
    "generate",
    "pattern_treewidth_certificate",
    "VERIFY_MAX_NODES",
]

# verify_lb_instance refuses larger graphs unless told otherwise
VERIFY_MAX_NODES = 80


class _Builder:
    """Accumulates labelled nodes, fixed edges and input-controlled edges."""

    def __init__(self) -> None:
        self.roles: list[str] = []
        self.side: list[int] = []
        self.colors: list[int] = []
        self.edges: list[tuple[int, int]] = []
        self.controlled: dict[tuple[int, int], tuple[int, int]] = {}

    def node(self, role: str, side: int, color: int = 0) -> int:
        self.roles.append(role)
        self.side.append(side)
        self.colors.append(color)
        return len(self.roles) - 1

    def nodes(self, prefix: str, count: int, side: int, color: int = 0) -> list[int]:
        return [self.node(f"{prefix}[{i}]", side, color) for i in range(count)]

    def edge(self, u: int, v: int) -> None:
        self.edges.append((u, v))

    def path(self, u: int, v: int, length: int, prefix: str, side: int,
             colors: list[int] | None = None) -> list[int]:
        """Path of ``length`` edges from ``u`` to ``v`` through fresh nodes."""
        inner = [
            self.node(f"{prefix}.p{t + 1}", side, colors[t] if colors else 0)
            for t in range(length - 1)
        ]
        chain = [u, *inner, v]
        for a, b in zip(chain, chain[1:]):
            self.edge(a, b)
        return inner

    def controlled_edge(self, u: int, v: int, side: int, index: int, disj: DisjointnessInput) -> None:
        key = (min(u, v), max(u, v))
        self.controlled[key] = (side, index)
        if disj.bits(side)[index]:
            self.edges.append(key)

    def finish(self, disj: DisjointnessInput, predicate: PredicateSpec, declared_cut: int,
               family: str, params: dict, colored: bool = False) -> LowerBoundInstance:
        g = Graph.from_edges(len(self.roles), self.edges, self.roles)
        v0 = frozenset(v for v, s in enumerate(self.side) if s == 0)
        v1 = frozenset(g.nodes()) - v0
        return LowerBoundInstance(
            graph=g,
            v0=v0,
            v1=v1,
            cut=crossing_edges(g, v0),
            disj=disj,
            predicate=predicate,
            expected=disj.intersects(),
            declared_cut=declared_cut,
            controlled=dict(self.controlled),
            family=family,
            coloring=Coloring(tuple(self.colors)) if colored else None,
            params={**params, "round_lower_bound": "Omega(m / (C(n) * b(n)))"},
        )


def _check_disj(disj: DisjointnessInput, n: int, shape: str) -> None:
    if disj.n != n or disj.shape != shape:
        raise GraphError(f"expected {shape} inputs for N={n}, got {disj.shape} inputs for N={disj.n}")
    if n < 1:
        raise GraphError("N must be positive")


def gen_induced_even_cycle(n: int, k: int, disj: DisjointnessInput,
                           path_between: str = "A2B2") -> LowerBoundInstance:
    """Induced ``2k``-cycle family.

    Four cliques of size ``N``; the pairs ``(a_{1,i}, b_{1,i})`` and
    ``(a_{2,i}, b_{2,i})`` are joined, one by an edge and the other by a path
    of ``2k - 3`` edges (``path_between`` picks which).  ``x0`` adds edges
    ``A_1``-``A_2``, ``x1`` adds edges ``B_1``-``B_2``.
    """
    if k < 3:
        raise GraphError("k must be at least 3")
    if path_between not in ("A1B1", "A2B2"):
        raise GraphError("path_between is 'A1B1' or 'A2B2'")
    _check_disj(disj, n, "square")
    b = _Builder()
    a1, a2 = b.nodes("A1", n, 0), b.nodes("A2", n, 0)
    b1, b2 = b.nodes("B1", n, 1), b.nodes("B2", n, 1)
    for group in (a1, a2, b1, b2):
        for u, v in combinations(group, 2):
            b.edge(u, v)
    for i in range(n):
        if path_between == "A2B2":
            b.edge(a1[i], b1[i])
            b.path(a2[i], b2[i], 2 * k - 3, f"P2[{i}]", 1)
        else:
            b.path(a1[i], b1[i], 2 * k - 3, f"P1[{i}]", 1)
            b.edge(a2[i], b2[i])
    for idx in range(n * n):
        j, l = disj.pair(idx)
        b.controlled_edge(a1[j], a2[l], 0, idx, disj)
        b.controlled_edge(b1[j], b2[l], 1, idx, disj)
    pred = PredicateSpec(PatternGraph(cycle_graph(2 * k)), True, False, f"C{2 * k}")
    return b.finish(disj, pred, 2 * n, "even-cycle",
                    {"N": n, "k": k, "path_between": path_between})


def connector_universe(n: int, k: int) -> int:
    """Smallest ``K`` with ``binom(K, k) >= N``."""
    if k < 1 or n < 1:
        raise GraphError("N and k must be positive")
    big_k = k
    while comb(big_k, k) < n:
        big_k += 1
    return big_k


@dataclass(frozen=True)
class GadgetCatalog:
    """Shared pieces of the treewidth-2 and degeneracy-2 constructions."""

    n: int
    k: int
    universe: int  # K
    rho: tuple[tuple[int, ...], ...]  # injection [N] -> k-subsets of [K]

    @classmethod
    def build(cls, n: int, k: int) -> "GadgetCatalog":
        big_k = connector_universe(n, k)
        rho = tuple(c for _, c in zip(range(n), combinations(range(big_k), k)))
        return cls(n, k, big_k, rho)

    def is_injection(self) -> bool:
        return len(set(self.rho)) == self.n and all(
            len(s) == self.k and all(0 <= x < self.universe for x in s) for s in self.rho
        )


def gen_pattern_Hk(k: int, long: bool = False) -> PatternGraph:
    """Four triangles; node 1 of ``A_1``-``A_2`` and of ``B_1``-``B_2`` joined;
    node 2 of ``A_i`` and ``B_i`` joined by ``k`` disjoint paths of length 3
    (length 5 when ``long``)."""
    if k < 2:
        raise GraphError("k must be at least 2")
    b = _Builder()
    tri = {}
    for name in ("A1", "A2", "B1", "B2"):
        nodes = [b.node(f"{name}.node{t + 1}", 0 if name[0] == "A" else 1) for t in range(3)]
        for u, v in combinations(nodes, 2):
            b.edge(u, v)
        tri[name] = nodes
    b.edge(tri["A1"][0], tri["A2"][0])
    b.edge(tri["B1"][0], tri["B2"][0])
    length = 5 if long else 3
    for side in ("1", "2"):
        for p in range(k):
            b.path(tri["A" + side][1], tri["B" + side][1], length, f"path{side}[{p}]", 0)
    return PatternGraph(Graph.from_edges(len(b.roles), b.edges, b.roles))


def _triangles(b: _Builder, n: int) -> dict[str, list[list[int]]]:
    tri: dict[str, list[list[int]]] = {}
    for name in ("A1", "A2", "B1", "B2"):
        side = 0 if name[0] == "A" else 1
        tri[name] = []
        for j in range(n):
            nodes = [b.node(f"{name}[{j}].node{t + 1}", side) for t in range(3)]
            for u, v in combinations(nodes, 2):
                b.edge(u, v)
            tri[name].append(nodes)
    return tri


def _connectors(b: _Builder, cat: GadgetCatalog) -> dict[str, list[int]]:
    con = {}
    for name in ("a1", "a2", "b1", "b2"):
        con[name] = b.nodes(name, cat.universe, 0 if name[0] == "a" else 1)
    for l in range(cat.universe):
        b.edge(con["a1"][l], con["b1"][l])
        b.edge(con["a2"][l], con["b2"][l])
    return con


def gen_treewidth2_instance(n: int, k: int, disj: DisjointnessInput) -> LowerBoundInstance:
    """``H_k`` family: ``4N`` triangles, ``4K`` connectors, node 2 of a
    triangle indexed ``j`` joined to the connectors in ``rho(j)``; the
    inputs add node-1 edges between ``A_{1,j}``, ``A_{2,l}`` (and ``B``)."""
    if k < 2:
        raise GraphError("k must be at least 2")
    _check_disj(disj, n, "square")
    cat = GadgetCatalog.build(n, k)
    b = _Builder()
    tri = _triangles(b, n)
    con = _connectors(b, cat)
    for name in ("A1", "A2", "B1", "B2"):
        conn = con[name[0].lower() + name[1]]
        for j in range(n):
            for l in cat.rho[j]:
                b.edge(tri[name][j][1], conn[l])
    for idx in range(n * n):
        j, l = disj.pair(idx)
        b.controlled_edge(tri["A1"][j][0], tri["A2"][l][0], 0, idx, disj)
        b.controlled_edge(tri["B1"][j][0], tri["B2"][l][0], 1, idx, disj)
    pred = PredicateSpec(gen_pattern_Hk(k), True, False, f"H{k}")
    return b.finish(disj, pred, 2 * cat.universe, "treewidth2",
                    {"N": n, "k": k, "K": cat.universe, "subgraph_implies_induced": True})


def gen_degeneracy2_instance(n: int, k: int, disj: DisjointnessInput) -> LowerBoundInstance:
    """``H'_k`` family: as the treewidth-2 family but triangles reach their
    connectors through paths of length 2, and the inputs are flat (``x0(j)``
    joins ``A_{1,j}`` with ``A_{2,j}``)."""
    if k < 2:
        raise GraphError("k must be at least 2")
    _check_disj(disj, n, "flat")
    cat = GadgetCatalog.build(n, k)
    b = _Builder()
    tri = _triangles(b, n)
    con = _connectors(b, cat)
    for name in ("A1", "A2", "B1", "B2"):
        side = 0 if name[0] == "A" else 1
        conn = con[name[0].lower() + name[1]]
        for j in range(n):
            for l in cat.rho[j]:
                b.path(tri[name][j][1], conn[l], 2, f"{name}[{j}]-c{l}", side)
    for j in range(n):
        b.controlled_edge(tri["A1"][j][0], tri["A2"][j][0], 0, j, disj)
        b.controlled_edge(tri["B1"][j][0], tri["B2"][j][0], 1, j, disj)
    pred = PredicateSpec(gen_pattern_Hk(k, long=True), True, False, f"H'{k}")
    return b.finish(disj, pred, 2 * cat.universe, "degeneracy2",
                    {"N": n, "k": k, "K": cat.universe, "subgraph_implies_induced": True})


def gen_multicolored_cycle(n: int, k: int, disj: DisjointnessInput,
                           induced: bool = False) -> tuple[LowerBoundInstance, Coloring]:
    """Multicolored ``k``-cycle family: ``A_1, A_2, B_1, B_2`` colored 1..4,
    a path of ``k - 3`` edges from ``a_{1,i}`` to ``b_{1,i}`` whose inner
    nodes take colors ``5..k``, and an edge ``a_{2,i} b_{2,i}``."""
    if k < 4:
        raise GraphError("k must be at least 4")
    _check_disj(disj, n, "square")
    b = _Builder()
    a1, a2 = b.nodes("A1", n, 0, 1), b.nodes("A2", n, 0, 2)
    b1, b2 = b.nodes("B1", n, 1, 3), b.nodes("B2", n, 1, 4)
    for i in range(n):
        b.path(a1[i], b1[i], k - 3, f"P[{i}]", 1, list(range(5, k + 1)))
        b.edge(a2[i], b2[i])
    for idx in range(n * n):
        j, l = disj.pair(idx)
        b.controlled_edge(a1[j], a2[l], 0, idx, disj)
        b.controlled_edge(b1[j], b2[l], 1, idx, disj)
    pred = PredicateSpec(PatternGraph(cycle_graph(k)), induced, True, f"C{k}")
    inst = b.finish(disj, pred, 2 * n, "multicolored-cycle", {"N": n, "k": k, "induced": induced},
                    colored=True)
    assert inst.coloring is not None
    return inst, inst.coloring


def gen_multicolored_induced_path(n: int, k: int, disj: DisjointnessInput
                                  ) -> tuple[LowerBoundInstance, Coloring]:
    """Multicolored induced ``k``-edge path family with terminals ``s``, ``t``.

    ``s`` sees all of ``A_1``, ``t`` all of ``C``; ``A_1`` and ``C`` form a
    complete bipartite graph minus the pairs ``a_{1,i} c_i``; ``c_i b_{1,i}``
    and ``a_{2,i} b_{2,i}`` are joined, the latter by a path of ``k - 5``
    edges whose inner nodes get the colors beyond 7.
    """
    if k < 6:
        raise GraphError("k must be at least 6")
    _check_disj(disj, n, "square")
    b = _Builder()
    a1, a2 = b.nodes("A1", n, 0, 2), b.nodes("A2", n, 0, 3)
    b1, b2 = b.nodes("B1", n, 1, 4), b.nodes("B2", n, 1, 5)
    c = b.nodes("C", n, 0, 6)
    s = b.node("s", 0, 1)
    t = b.node("t", 0, 7)
    for i in range(n):
        b.edge(s, a1[i])
        b.edge(t, c[i])
        b.edge(c[i], b1[i])
        b.path(a2[i], b2[i], k - 5, f"P[{i}]", 1, list(range(8, k + 2)))
        for j in range(n):
            if i != j:
                b.edge(a1[i], c[j])
    for idx in range(n * n):
        j, l = disj.pair(idx)
        b.controlled_edge(a1[j], a2[l], 0, idx, disj)
        b.controlled_edge(b1[j], b2[l], 1, idx, disj)
    pred = PredicateSpec(PatternGraph(path_graph(k + 1)), True, True, f"P{k}")
    inst = b.finish(disj, pred, 2 * n, "multicolored-path", {"N": n, "k": k}, colored=True)
    assert inst.coloring is not None
    return inst, inst.coloring


def gen_clique_gadget_instance(n: int, disj: DisjointnessInput, s: int = 4) -> LowerBoundInstance:
    """Small ``K_4`` family for exercising lifts: gadget ``j`` holds
    ``a_j, a'_j`` on side 0 and ``b_j, b'_j`` on side 1, all four cross pairs
    joined; ``x0(j)`` adds ``a_j a'_j`` and ``x1(j)`` adds ``b_j b'_j``."""
    if s != 4:
        raise GraphError("the gadget family encodes K_4 only")
    _check_disj(disj, n, "flat")
    b = _Builder()
    for j in range(n):
        a, a2 = b.node(f"a[{j}]", 0), b.node(f"a'[{j}]", 0)
        c, c2 = b.node(f"b[{j}]", 1), b.node(f"b'[{j}]", 1)
        for u in (a, a2):
            for v in (c, c2):
                b.edge(u, v)
        b.controlled_edge(a, a2, 0, j, disj)
        b.controlled_edge(c, c2, 1, j, disj)
    pred = PredicateSpec(PatternGraph(complete_graph(4)), False, False, "K4")
    return b.finish(disj, pred, 4 * n, "clique-gadget", {"N": n, "s": 4})


def pattern_treewidth_certificate(h: PatternGraph | Graph):
    """Width-2 tree decomposition of ``H_k`` from a min-degree elimination."""
    g = h.graph if isinstance(h, PatternGraph) else h
    adj = {v: set(g.neighbors(v)) for v in g.nodes()}
    order = []
    while adj:
        v = min(adj, key=lambda x: (len(adj[x]), x))
        nbrs = adj.pop(v)
        for a in nbrs:
            adj[a].discard(v)
            adj[a].update(nbrs - {a})
        order.append(v)
    return decomposition_from_order(g, order)


@dataclass
class LbReport:
    family: str
    clauses: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.clauses)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.clauses.append((name, ok, detail))

    def lines(self) -> list[str]:
        return [f"{name}: {'pass' if ok else 'FAIL'}{' ' + d if d else ''}" for name, ok, d in self.clauses]


def verify_lb_instance(inst: LowerBoundInstance, chi: Coloring | None = None, *,
                       override_scale: bool = False) -> LbReport:
    """Check (i) predicate iff intersecting inputs, (ii) partition and cut,
    (iii) locality of input-controlled edges, (iv) the declared cut size."""
    g = inst.graph
    if g.node_count > VERIFY_MAX_NODES and not override_scale:
        raise ScaleError(f"verify_lb_instance limited to {VERIFY_MAX_NODES} nodes")
    report = LbReport(inst.family)
    problems = inst.structural_problems()
    pred = inst.predicate
    chi = chi if chi is not None else inst.coloring
    if pred.multicolored:
        if chi is None:
            raise GraphError("multicolored predicate needs a coloring")
        found = oracle_multicolored(g, pred.pattern, chi, pred.induced, override_scale=True)
    else:
        found = oracle_subgraph(g, pred.pattern, pred.induced, override_scale=True)
    holds = found is not None
    detail = f"holds={holds} intersect={inst.disj.intersects()}"
    flag_msgs = [m for c, m in problems if c == "predicate"]
    report.add("predicate", holds == inst.disj.intersects() and not flag_msgs,
               "; ".join([detail, *flag_msgs]))
    if inst.params.get("subgraph_implies_induced"):
        loose = oracle_subgraph(g, pred.pattern, False, override_scale=True)
        induced_ok = loose is None or type(loose)(loose.map, True).is_valid(g, pred.pattern)
        report.add("subgraph-is-induced", (loose is not None) == holds and induced_ok)
    for clause in ("partition", "locality", "cut-size"):
        msgs = [m for c, m in problems if c == clause]
        report.add(clause, not msgs, "; ".join(msgs[:3]))
    return report


FAMILIES = {
    "even-cycle": ("square", gen_induced_even_cycle),
    "treewidth2": ("square", gen_treewidth2_instance),
    "degeneracy2": ("flat", gen_degeneracy2_instance),
    "multicolored-cycle": ("square", gen_multicolored_cycle),
    "multicolored-path": ("square", gen_multicolored_induced_path),
    "clique-gadget": ("flat", lambda n, k, disj: gen_clique_gadget_instance(n, disj, k)),
}

DEFAULT_K = {"even-cycle": 3, "treewidth2": 2, "degeneracy2": 2,
             "multicolored-cycle": 4, "multicolored-path": 6, "clique-gadget": 4}


def generate(family: str, n: int, k: int | None, disj: DisjointnessInput, **kw) -> LowerBoundInstance:
    """Dispatch by family name; multicolored families return the instance only
    (its coloring rides on ``inst.coloring``)."""
    if family not in FAMILIES:
        raise GraphError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    _, fn = FAMILIES[family]
    out = fn(n, DEFAULT_K[family] if k is None else k, disj, **kw)
    return out[0] if isinstance(out, tuple) else out



_GEN_KW = {"even-cycle": ("path_between",), "multicolored-cycle": ("induced",)}


def generate_from_params(family: str, params: dict, disj: DisjointnessInput) -> LowerBoundInstance:
    kw = {key: params[key] for key in _GEN_KW.get(family, ()) if key in params}
    k = params.get("k", params.get("s"))
    return generate(family, params["N"], k, disj, **kw)


def load_instance(g: Graph, records: list[str]) -> LowerBoundInstance:
    """Rebuild an instance from a graph file and its sidecar records.

    Sides, cut, declared cut size and expected flag come from the file; the
    pattern and the list of input-controlled edges are regenerated from the
    family parameters, so a tampered file shows up in the structural checks.
    """
    rec: dict[str, str] = {}
    for line in records:
        key, _, rest = line.partition(" ")
        rec[key] = rest
    for key in ("family", "disj", "side", "cut", "params"):
        if key not in rec:
            raise GraphError(f"instance file lacks the {key!r} record")
    fields = dict(kv.split("=", 1) for kv in rec["disj"].split())
    disj = DisjointnessInput.from_hex(fields["x0"], fields["x1"], int(fields["N"]), fields["shape"])
    params = json.loads(rec["params"])
    ref = generate_from_params(rec["family"], params, disj)
    sides = [int(x) for x in rec["side"].split()]
    if len(sides) != g.node_count:
        raise GraphError("side record does not list every node")
    cut = []
    for tok in rec["cut"].split():
        u, v = tok.split("-")
        cut.append((int(u), int(v)))
    v0 = frozenset(v for v, s in enumerate(sides) if s == 0)
    coloring = ref.coloring
    if "coloring" in rec:
        coloring = Coloring(tuple(int(c) for c in rec["coloring"].split()))
    return LowerBoundInstance(
        graph=g,
        v0=v0,
        v1=frozenset(g.nodes()) - v0,
        cut=tuple(cut),
        disj=disj,
        predicate=ref.predicate,
        expected=bool(int(rec.get("expected", int(ref.expected)))),
        declared_cut=int(rec.get("declared_cut", ref.declared_cut)),
        controlled=ref.controlled,
        family=rec["family"],
        coloring=coloring,
        params=params,
    )


def structural_claims(k: int, long: bool = False) -> dict:
    """Exact treewidth of ``H_k`` next to the width of an explicit decomposition."""
    h = gen_pattern_Hk(k, long)
    return {"treewidth": treewidth_exact_small(h.graph, override_scale=True),
            "certificate_width": pattern_treewidth_certificate(h).width}


def degeneracy_of(inst: LowerBoundInstance) -> int:
    return degeneracy(inst.graph)[0]


def iter_witnesses(inst: LowerBoundInstance, limit: int = 50):
    pred = inst.predicate
    it = iter_embeddings(inst.graph, pred.pattern, pred.induced, inst.coloring if pred.multicolored else None,
                         override_scale=True)
    for _, w in zip(range(limit), it):
        yield w
