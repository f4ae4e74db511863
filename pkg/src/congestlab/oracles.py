"""Exhaustive brute-force oracles used as ground truth for the algorithms.

Every routine here is exponential.  Size limits are module constants; pass
``override_scale=True`` to go past them deliberately.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterator

from .graphs import (
    CliqueCover,
    Coloring,
    Graph,
    GraphError,
    McisMapping,
    PatternGraph,
    ScaleError,
    SubgraphWitness,
    as_graph,
)

__all__ = [
    "ORACLE_MAX_PATTERN",
    "ORACLE_MAX_HOST",
    "MCIS_MAX_TOTAL",
    "CLIQUE_COVER_MAX",
    "iter_embeddings",
    "oracle_subgraph",
    "oracle_multicolored",
    "oracle_mcis",
    "s_cliques",
    "is_colorable",
    "check_clique_cover",
    "min_s_clique_cover",
]

ORACLE_MAX_PATTERN = 8
ORACLE_MAX_HOST = 14
MCIS_MAX_TOTAL = 14
CLIQUE_COVER_MAX = 8


def _check_scale(n: int, k: int, override: bool) -> None:
    if override:
        return
    if k > ORACLE_MAX_PATTERN and n > ORACLE_MAX_HOST:
        raise ScaleError(
            f"oracle limited to k <= {ORACLE_MAX_PATTERN} or n <= {ORACLE_MAX_HOST} "
            f"(got k={k}, n={n}); pass override_scale=True to force"
        )


def _search_order(h: Graph) -> list[int]:
    """Pattern nodes ordered so that each one (after the first of its component)
    has an already placed neighbour; high-degree nodes first."""
    order: list[int] = []
    placed: set[int] = set()
    remaining = set(h.nodes())
    while remaining:
        start = max(remaining, key=lambda v: (h.degree(v), -v))
        order.append(start)
        placed.add(start)
        remaining.discard(start)
        while True:
            frontier = [v for v in remaining if h.neighbors(v) & placed]
            if not frontier:
                break
            v = max(frontier, key=lambda x: (len(h.neighbors(x) & placed), h.degree(x), -x))
            order.append(v)
            placed.add(v)
            remaining.discard(v)
    return order


def iter_embeddings(
    g: Graph,
    h: Graph | PatternGraph,
    induced: bool,
    chi: Coloring | None = None,
    *,
    override_scale: bool = False,
) -> Iterator[SubgraphWitness]:
    """Yield every (induced) copy of ``h`` in ``g`` as a witness.

    With ``chi`` given, only copies using each color ``1..k`` exactly once are
    produced (color 0 nodes are never used).
    """
    h = as_graph(h)
    n, k = g.node_count, h.node_count
    _check_scale(n, k, override_scale)
    if k > n:
        return
    adj = [0] * n
    for u, v in g.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    full = (1 << n) - 1
    usable = full
    color_mask: dict[int, int] = {}
    if chi is not None:
        chi.check_carrier(g)
        usable = 0
        for v in range(n):
            c = chi[v]
            if 1 <= c <= k:
                usable |= 1 << v
                color_mask[c] = color_mask.get(c, 0) | (1 << v)
        if len(color_mask) < k:
            return
    order = _search_order(h)
    # for each step, which earlier steps are adjacent / non-adjacent in h
    earlier_adj = []
    earlier_non = []
    for i, p in enumerate(order):
        earlier_adj.append([j for j in range(i) if h.has_edge(p, order[j])])
        earlier_non.append([j for j in range(i) if not h.has_edge(p, order[j])])
    deg_ok = []
    for p in order:
        need = h.degree(p)
        mask = 0
        for v in range(n):
            if bin(adj[v]).count("1") >= need:
                mask |= 1 << v
        deg_ok.append(mask)
    image = [0] * k

    def rec(i: int, used: int, blocked: int) -> Iterator[SubgraphWitness]:
        if i == k:
            mapping = [0] * k
            for step, p in enumerate(order):
                mapping[p] = image[step]
            yield SubgraphWitness(tuple(mapping), induced)
            return
        cand = usable & deg_ok[i] & ~used & ~blocked
        for j in earlier_adj[i]:
            cand &= adj[image[j]]
        if induced:
            for j in earlier_non[i]:
                cand &= ~adj[image[j]]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            image[i] = v
            extra = 0
            if chi is not None:
                extra = color_mask[chi[v]]
            yield from rec(i + 1, used | low, blocked | extra)

    yield from rec(0, 0, 0)


def oracle_subgraph(
    g: Graph, h: Graph | PatternGraph, induced: bool, *, override_scale: bool = False
) -> SubgraphWitness | None:
    return next(iter_embeddings(g, h, induced, override_scale=override_scale), None)


def oracle_multicolored(
    g: Graph,
    h: Graph | PatternGraph,
    chi: Coloring,
    induced: bool,
    *,
    override_scale: bool = False,
) -> SubgraphWitness | None:
    return next(iter_embeddings(g, h, induced, chi, override_scale=override_scale), None)


def oracle_mcis(g: Graph, h: Graph, *, override_scale: bool = False) -> McisMapping:
    """Largest common induced subgraph, by trying node subsets of ``g`` from
    largest to smallest and embedding each into ``h``."""
    g, h = as_graph(g), as_graph(h)
    if g.node_count + h.node_count > MCIS_MAX_TOTAL and not override_scale:
        raise ScaleError(f"oracle_mcis limited to |V_G| + |V_H| <= {MCIS_MAX_TOTAL}")
    for size in range(min(g.node_count, h.node_count), 0, -1):
        for subset in combinations(range(g.node_count), size):
            sub = g.induced(subset)
            w = next(iter_embeddings(h, sub, True, override_scale=True), None)
            if w is not None:
                assign: list[int | None] = [None] * g.node_count
                for idx, v in enumerate(subset):
                    assign[v] = w.map[idx]
                return McisMapping(tuple(assign))
    return McisMapping(tuple([None] * g.node_count))


def s_cliques(h: Graph, s: int) -> list[tuple[int, ...]]:
    return [c for c in combinations(range(h.node_count), s) if h.is_clique(c)]


def is_colorable(h: Graph, nodes, colors: int) -> bool:
    nodes = list(nodes)
    color: dict[int, int] = {}

    def rec(i: int) -> bool:
        if i == len(nodes):
            return True
        v = nodes[i]
        taken = {color[w] for w in h.neighbors(v) if w in color}
        # symmetry break: never open more than one fresh color at a time
        limit = min(colors, max(color.values(), default=-1) + 2)
        for c in range(limit):
            if c not in taken:
                color[v] = c
                if rec(i + 1):
                    return True
                del color[v]
        return False

    return rec(0)


def check_clique_cover(h: Graph | PatternGraph, cover: CliqueCover) -> list[str]:
    """Return a list of violated cover conditions (empty when valid)."""
    h = as_graph(h)
    problems = []
    sets = [set(c) for c in cover.sets]
    for c in cover.sets:
        if any(not (0 <= v < h.node_count) for v in c):
            problems.append(f"set {c} has nodes outside the pattern")
    for clique in s_cliques(h, cover.s):
        if not any(set(clique) <= c for c in sets):
            problems.append(f"{cover.s}-clique {clique} is not covered")
    for c in cover.sets:
        if not is_colorable(h, c, cover.s):
            problems.append(f"set {c} is not {cover.s}-colorable")
    return problems


def min_s_clique_cover(
    h: Graph | PatternGraph, s: int, *, override_scale: bool = False
) -> CliqueCover:
    """Minimum ``s``-clique cover by exhaustive search over families.

    Candidate sets are the inclusion-maximal ``s``-colorable node sets (any
    cover set can be grown to one).  The lexicographically first family of the
    smallest size is then shrunk so each set is the union of the ``s``-cliques
    it is responsible for.
    """
    h = as_graph(h)
    k = h.node_count
    if k > CLIQUE_COVER_MAX and not override_scale:
        raise ScaleError(f"min_s_clique_cover limited to k <= {CLIQUE_COVER_MAX}")
    if s < 1:
        raise GraphError("s must be positive")
    cliques = s_cliques(h, s)
    if not cliques:
        raise GraphError(f"pattern has no {s}-clique")
    colorable = []
    for mask in range(1, 1 << k):
        nodes = [v for v in range(k) if mask >> v & 1]
        if is_colorable(h, nodes, s):
            colorable.append(mask)
    colorable_set = set(colorable)
    maximal = []
    for mask in colorable:
        if not any((mask | (1 << v)) in colorable_set for v in range(k) if not mask >> v & 1):
            maximal.append(mask)
    maximal.sort(key=lambda m: [v for v in range(k) if m >> v & 1])
    clique_masks = [sum(1 << v for v in c) for c in cliques]
    useful = [m for m in maximal if any(cm & m == cm for cm in clique_masks)]
    for t in range(1, len(useful) + 1):
        for family in combinations(useful, t):
            if all(any(cm & m == cm for m in family) for cm in clique_masks):
                owned = [0] * t
                for cm in clique_masks:
                    for i, m in enumerate(family):
                        if cm & m == cm:
                            owned[i] |= cm
                            break
                sets = tuple(tuple(v for v in range(k) if o >> v & 1) for o in owned)
                return CliqueCover(s, sets)
    raise AssertionError("unreachable: the set of all maximal sets is a cover")
