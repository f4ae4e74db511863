"""Simple undirected graphs with dense integer node ids, plus small builders."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Graph",
    "PatternGraph",
    "Coloring",
    "CliqueCover",
    "SubgraphWitness",
    "McisMapping",
    "TreeDecomposition",
    "GraphError",
    "ScaleError",
    "as_graph",
    "complete_graph",
    "empty_graph",
    "path_graph",
    "cycle_graph",
    "star_graph",
    "disjoint_union",
    "gnp_graph",
    "random_degenerate_graph",
]


class GraphError(ValueError):
    """Raised for malformed graphs or graph-derived objects."""


class ScaleError(ValueError):
    """Raised when an exhaustive routine is asked to work beyond its size limit."""


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..node_count-1``.

    ``roles`` is an optional human-readable label per node; it does not take
    part in equality.
    """

    node_count: int
    edges: frozenset[tuple[int, int]]
    roles: tuple[str, ...] | None = field(default=None, compare=False, repr=False)
    _adj: tuple[frozenset[int], ...] = field(default=(), compare=False, repr=False, init=False)

    def __post_init__(self) -> None:
        if self.node_count < 0:
            raise GraphError("node_count must be non-negative")
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise GraphError(f"edge ({u}, {v}) out of range for n={self.node_count}")
            normalized.add(_norm(u, v))
        object.__setattr__(self, "edges", frozenset(normalized))
        adj: list[set[int]] = [set() for _ in range(self.node_count)]
        for u, v in normalized:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))
        if self.roles is not None and len(self.roles) != self.node_count:
            raise GraphError("roles must have one entry per node")

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[Sequence[int]], roles: Sequence[str] | None = None
    ) -> "Graph":
        return cls(n, frozenset(_norm(int(u), int(v)) for u, v in edges),
                   tuple(roles) if roles is not None else None)

    @property
    def n(self) -> int:
        return self.node_count

    @property
    def m(self) -> int:
        return len(self.edges)

    def nodes(self) -> range:
        return range(self.node_count)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def sorted_neighbors(self, v: int) -> list[int]:
        return sorted(self._adj[v])

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def role(self, v: int) -> str:
        if self.roles is None:
            return str(v)
        return self.roles[v]

    def with_roles(self, roles: Sequence[str]) -> "Graph":
        return Graph(self.node_count, self.edges, tuple(roles))

    def induced(self, nodes: Sequence[int]) -> "Graph":
        """Induced subgraph, relabelled to ``0..len(nodes)-1`` in the given order."""
        index = {v: i for i, v in enumerate(nodes)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Graph.from_edges(len(nodes), edges)

    def relabel(self, mapping: Mapping[int, int] | Sequence[int], n: int | None = None) -> "Graph":
        size = self.node_count if n is None else n
        return Graph.from_edges(size, ((mapping[u], mapping[v]) for u, v in self.edges))

    def is_connected(self) -> bool:
        if self.node_count == 0:
            return True
        return len(self.component_of(0)) == self.node_count

    def component_of(self, start: int) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def components(self) -> list[set[int]]:
        seen: set[int] = set()
        out = []
        for v in range(self.node_count):
            if v not in seen:
                comp = self.component_of(v)
                seen |= comp
                out.append(comp)
        return out

    def distances_from(self, source: int) -> dict[int, int]:
        dist = {source: 0}
        frontier = [source]
        while frontier:
            nxt = []
            for u in frontier:
                for w in self._adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            frontier = nxt
        return dist

    def is_forest(self) -> bool:
        return self.m == self.node_count - len(self.components())

    def is_tree(self) -> bool:
        return self.node_count >= 1 and self.is_connected() and self.m == self.node_count - 1

    def is_clique(self, nodes: Iterable[int]) -> bool:
        return all(self.has_edge(u, v) for u, v in combinations(list(nodes), 2))

    def is_independent(self, nodes: Iterable[int]) -> bool:
        return not any(self.has_edge(u, v) for u, v in combinations(list(nodes), 2))

    def __str__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.m})"


@dataclass(frozen=True)
class PatternGraph:
    """A pattern ``H`` with ``k`` nodes."""

    graph: Graph

    def __post_init__(self) -> None:
        if self.graph.node_count < 1:
            raise GraphError("a pattern needs at least one node")

    @property
    def k(self) -> int:
        return self.graph.node_count


def as_graph(g: Graph | PatternGraph) -> Graph:
    return g.graph if isinstance(g, PatternGraph) else g


@dataclass(frozen=True)
class Coloring:
    """Per-node colors in ``0..k``; color 0 marks nodes that cannot be used."""

    color_of: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "color_of", tuple(int(c) for c in self.color_of))
        if any(c < 0 for c in self.color_of):
            raise GraphError("colors must be non-negative")

    def __getitem__(self, v: int) -> int:
        return self.color_of[v]

    def __len__(self) -> int:
        return len(self.color_of)

    def check_carrier(self, g: Graph) -> None:
        if len(self.color_of) != g.node_count:
            raise GraphError("coloring must be defined for every node of the graph")


@dataclass(frozen=True)
class CliqueCover:
    """An ordered family of node sets covering every ``s``-clique of a pattern."""

    s: int
    sets: tuple[tuple[int, ...], ...]

    @property
    def t(self) -> int:
        return len(self.sets)


@dataclass(frozen=True)
class SubgraphWitness:
    """Injection from pattern nodes (by index) to host nodes."""

    map: tuple[int, ...]
    induced_flag: bool

    def is_valid(self, g: Graph, h: Graph | PatternGraph) -> bool:
        h = as_graph(h)
        if len(self.map) != h.node_count or len(set(self.map)) != len(self.map):
            return False
        for a, b in combinations(range(h.node_count), 2):
            pe = h.has_edge(a, b)
            ge = g.has_edge(self.map[a], self.map[b])
            if pe and not ge:
                return False
            if self.induced_flag and ge and not pe:
                return False
        return True


BOT = None


@dataclass(frozen=True)
class McisMapping:
    """Partial injection ``V_G -> V_H``; ``None`` stands for the bottom value."""

    assign: tuple[int | None, ...]

    @property
    def size(self) -> int:
        return sum(1 for a in self.assign if a is not None)

    @property
    def domain(self) -> list[int]:
        return [v for v, a in enumerate(self.assign) if a is not None]

    def is_valid(self, g: Graph, h: Graph) -> bool:
        if len(self.assign) != g.node_count:
            return False
        dom = self.domain
        images = [self.assign[v] for v in dom]
        if len(set(images)) != len(images):
            return False
        if any(not (0 <= w < h.node_count) for w in images):
            return False
        for u, v in combinations(dom, 2):
            if g.has_edge(u, v) != h.has_edge(self.assign[u], self.assign[v]):
                return False
        return True

    def lines(self) -> list[str]:
        return [f"{v} -> {'BOT' if a is None else a}" for v, a in enumerate(self.assign)]


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    tree: Graph

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def is_valid(self, g: Graph) -> bool:
        if self.tree.node_count != len(self.bags):
            return False
        if self.bags and not self.tree.is_tree():
            return False
        covered = set().union(*self.bags) if self.bags else set()
        if covered != set(g.nodes()):
            return False
        for u, v in g.edges:
            if not any(u in b and v in b for b in self.bags):
                return False
        # bags containing a node must induce a connected subtree
        for v in g.nodes():
            holding = [i for i, b in enumerate(self.bags) if v in b]
            if not holding:
                return False
            sub = self.tree.induced(holding)
            if not sub.is_connected():
                return False
        return True


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def empty_graph(n: int) -> Graph:
    return Graph.from_edges(n, [])


def path_graph(n: int) -> Graph:
    """Path on ``n`` nodes (``n - 1`` edges)."""
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 nodes")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    """``K_{1,leaves}`` with the center at node 0."""
    return Graph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    offset = 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.node_count
    return Graph.from_edges(offset, edges)


def gnp_graph(n: int, p: float, rng: random.Random) -> Graph:
    return Graph.from_edges(n, [e for e in combinations(range(n), 2) if rng.random() < p])


def random_degenerate_graph(n: int, d: int, rng: random.Random, p: float = 0.7) -> Graph:
    """Each node joins up to ``d`` random earlier nodes, so degeneracy is at most ``d``."""
    edges = []
    for v in range(1, n):
        picks = rng.sample(range(v), min(d, v))
        edges.extend((u, v) for u in picks if rng.random() < p)
    return Graph.from_edges(n, edges)
