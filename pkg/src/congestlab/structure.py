"""Structural parameters: degeneracy, vertex cover, treewidth."""

from __future__ import annotations

from itertools import combinations

from .graphs import Graph, GraphError, ScaleError, TreeDecomposition

__all__ = [
    "TREEWIDTH_MAX_NODES",
    "degeneracy",
    "is_vertex_cover",
    "min_vertex_cover",
    "vertex_cover_number",
    "treewidth_exact_small",
    "decomposition_from_order",
    "complement",
]

TREEWIDTH_MAX_NODES = 12


def degeneracy(g: Graph) -> tuple[int, list[int]]:
    """Min-degree peeling; ties go to the lowest id.

    Returns ``(d, order)`` where ``d`` is the largest degree seen at removal time.
    """
    deg = [g.degree(v) for v in g.nodes()]
    alive = set(g.nodes())
    order = []
    d = 0
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        d = max(d, deg[v])
        order.append(v)
        alive.remove(v)
        for w in g.neighbors(v):
            if w in alive:
                deg[w] -= 1
    return d, order


def is_vertex_cover(g: Graph, nodes) -> bool:
    s = set(nodes)
    return all(u in s or v in s for u, v in g.edges)


def _cover_within(adj: dict[int, set[int]], budget: int) -> list[int] | None:
    # adj only holds nodes that still have uncovered edges
    if not adj:
        return []
    if budget <= 0:
        return None
    v = max(adj, key=lambda x: (len(adj[x]), -x))
    if len(adj[v]) > budget:
        # v must be in any cover of this size
        return _take(adj, [v], budget)
    first = _take(adj, [v], budget)
    if first is not None:
        return first
    return _take(adj, sorted(adj[v]), budget)


def _take(adj: dict[int, set[int]], chosen: list[int], budget: int) -> list[int] | None:
    if len(chosen) > budget:
        return None
    rest = {u: set(ns) for u, ns in adj.items() if u not in chosen}
    for c in chosen:
        for u in adj[c]:
            if u in rest:
                rest[u].discard(c)
    rest = {u: ns for u, ns in rest.items() if ns}
    sub = _cover_within(rest, budget - len(chosen))
    if sub is None:
        return None
    return chosen + sub


def min_vertex_cover(g: Graph, budget: int) -> set[int] | None:
    """Minimum vertex cover if its size is at most ``budget``, else ``None``.

    Bounded-depth branching on a maximum-degree node, run for increasing size
    limits so the first cover found is a minimum one.
    """
    if budget < 0:
        raise GraphError("budget must be non-negative")
    adj = {v: set(g.neighbors(v)) for v in g.nodes() if g.degree(v) > 0}
    for size in range(0, budget + 1):
        found = _cover_within(adj, size)
        if found is not None:
            return set(found)
    return None


def vertex_cover_number(g: Graph) -> int:
    cover = min_vertex_cover(g, g.node_count)
    assert cover is not None
    return len(cover)


def treewidth_exact_small(g: Graph, *, override_scale: bool = False) -> int:
    """Exact treewidth by dynamic programming over elimination prefixes.

    ``TW(S) = min_v max(TW(S - v), |Q(S - v, v)|)`` where ``Q(S, v)`` is the set
    of nodes outside ``S + v`` reachable from ``v`` through ``S``.  This is the
    minimum over all elimination orders of the largest fill-in neighbourhood.
    """
    n = g.node_count
    if n > TREEWIDTH_MAX_NODES and not override_scale:
        raise ScaleError(f"treewidth_exact_small supports n <= {TREEWIDTH_MAX_NODES}, got {n}")
    if n == 0:
        return -1
    low, high = _minor_min_width(g), _min_fill_width(g)
    if low == high:
        return high
    adj = [0] * n
    for u, v in g.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u

    def q_size(s: int, v: int) -> int:
        seen = 1 << v
        frontier = 1 << v
        reach = 0
        while frontier:
            nxt = 0
            f = frontier
            while f:
                low = f & -f
                u = low.bit_length() - 1
                f ^= low
                nxt |= adj[u]
            nxt &= ~seen
            seen |= nxt
            reach |= nxt & ~s
            frontier = nxt & s
        return bin(reach).count("1")

    full = (1 << n) - 1
    best = [0] * (1 << n)
    best[0] = -1
    for s in range(1, full + 1):
        value = n
        rest = s
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            prev = s ^ low
            cand = max(best[prev], q_size(prev, v))
            if cand < value:
                value = cand
        best[s] = value
    return best[full]


def _minor_min_width(g: Graph) -> int:
    """Lower bound: contract a min-degree node into its min-degree neighbour,
    keeping the largest min degree seen."""
    adj = {v: set(g.neighbors(v)) for v in g.nodes()}
    bound = 0
    while len(adj) > 1:
        v = min(adj, key=lambda x: (len(adj[x]), x))
        bound = max(bound, len(adj[v]))
        if not adj[v]:
            del adj[v]
            continue
        u = min(adj[v], key=lambda x: (len(adj[x]), x))
        for w in adj.pop(v):
            adj[w].discard(v)
            if w != u:
                adj[w].add(u)
                adj[u].add(w)
    return bound


def _min_fill_width(g: Graph) -> int:
    """Upper bound: width of the greedy min-fill elimination order."""
    adj = {v: set(g.neighbors(v)) for v in g.nodes()}
    width = 0

    def fill(v: int) -> int:
        nbrs = list(adj[v])
        return sum(1 for a, b in combinations(nbrs, 2) if b not in adj[a])

    while adj:
        v = min(adj, key=lambda x: (fill(x), len(adj[x]), x))
        nbrs = adj.pop(v)
        width = max(width, len(nbrs))
        for a in nbrs:
            adj[a].discard(v)
            adj[a].update(nbrs - {a})
    return width


def decomposition_from_order(g: Graph, order: list[int]) -> TreeDecomposition:
    """Tree decomposition induced by eliminating nodes in ``order``."""
    if sorted(order) != list(g.nodes()):
        raise GraphError("order must be a permutation of the nodes")
    n = g.node_count
    if n == 0:
        return TreeDecomposition((), Graph.from_edges(0, []))
    adj = [set(g.neighbors(v)) for v in g.nodes()]
    position = {v: i for i, v in enumerate(order)}
    bags = []
    later_nbrs = []
    for v in order:
        nbrs = {w for w in adj[v] if position[w] > position[v]}
        for a, b in combinations(nbrs, 2):
            adj[a].add(b)
            adj[b].add(a)
        bags.append(frozenset(nbrs | {v}))
        later_nbrs.append(nbrs)
    tree_edges = []
    for i, v in enumerate(order):
        if later_nbrs[i]:
            parent = min(later_nbrs[i], key=lambda w: position[w])
            tree_edges.append((i, position[parent]))
        elif i + 1 < n:
            # start of a new component in the elimination forest; link to keep a tree
            tree_edges.append((i, i + 1))
    return TreeDecomposition(tuple(bags), Graph.from_edges(n, tree_edges))


def complement(g: Graph) -> Graph:
    edges = [(u, v) for u, v in combinations(range(g.node_count), 2) if not g.has_edge(u, v)]
    return Graph(g.node_count, frozenset(edges), g.roles)
