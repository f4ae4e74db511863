"""Maximum common induced subgraph by enumeration around vertex covers.

Cover nodes of each graph are split three ways: mapped into the other
cover (``to_cover``), mapped into the other independent set (``to_indep``) or
dropped (``to_bot``).  Independent-set nodes are grouped by their neighbours
among non-dropped cover nodes; members of a group are interchangeable, so a
candidate only has to say which group each ``to_indep`` node lands in.  The
independent-set nodes left over are then matched group to group.

Everything below works from the cover structure and the group sizes alone,
which is exactly what every node knows in the distributed version.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from math import factorial
from typing import Iterator

from ..graphs import Graph

__all__ = [
    "McisPartitioning",
    "EquivalenceClassTable",
    "McisCandidate",
    "McisCounters",
    "CoverView",
    "iter_partitionings",
    "class_table",
    "best_candidate",
    "candidate_space_size",
    "candidate_count_bound",
]


@dataclass(frozen=True)
class McisPartitioning:
    to_cover: tuple[int, ...]
    to_indep: tuple[int, ...]
    to_bot: tuple[int, ...]

    @property
    def kept(self) -> tuple[int, ...]:
        """Non-dropped cover nodes in id order; signatures are subsets of these."""
        return tuple(sorted(self.to_cover + self.to_indep))

    def signature_index(self, neighbours) -> int:
        """Bitmask of ``neighbours`` over :attr:`kept`."""
        return sum(1 << i for i, c in enumerate(self.kept) if c in neighbours)


@dataclass(frozen=True)
class EquivalenceClassTable:
    """Group sizes indexed by signature bitmask over the kept cover nodes;
    ``members`` is only filled when the graph is known in full."""

    part: McisPartitioning
    sizes: tuple[int, ...]
    members: tuple[tuple[int, ...], ...] | None = None


@dataclass(frozen=True)
class McisCandidate:
    cover_bijection: tuple[tuple[int, int], ...]  # (g cover node, h cover node)
    class_assign_g: tuple[tuple[int, int], ...]  # (g to_indep node, h signature)
    class_assign_h: tuple[tuple[int, int], ...]  # (h to_indep node, g signature)
    size: int


@dataclass
class McisCounters:
    partitionings: int = 0  # (G, H) partitioning pairs examined
    candidates: int = 0  # complete candidates examined, all partitionings
    max_candidates_per_partitioning: int = 0
    bound_checks: list[tuple[int, int]] = field(default_factory=list)  # (count, bound)

    def as_record(self) -> dict:
        return {
            "partitionings": self.partitionings,
            "candidates": self.candidates,
            "max_candidates_per_partitioning": self.max_candidates_per_partitioning,
        }


@dataclass(frozen=True)
class CoverView:
    """What a node knows about one graph: its cover, the edges inside the
    cover, and (optionally) each independent node's cover neighbours."""

    cover: tuple[int, ...]
    cover_edges: frozenset[tuple[int, int]]

    @classmethod
    def of(cls, g: Graph, cover) -> "CoverView":
        c = tuple(sorted(cover))
        cs = set(c)
        return cls(c, frozenset(e for e in g.edges if e[0] in cs and e[1] in cs))

    def adjacent(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.cover_edges


def iter_partitionings(cover: tuple[int, ...]) -> Iterator[McisPartitioning]:
    for parts in product(range(3), repeat=len(cover)):
        yield McisPartitioning(
            tuple(c for c, p in zip(cover, parts) if p == 0),
            tuple(c for c, p in zip(cover, parts) if p == 1),
            tuple(c for c, p in zip(cover, parts) if p == 2),
        )


def class_table(g: Graph, cover, part: McisPartitioning) -> EquivalenceClassTable:
    cs = set(cover)
    buckets: list[list[int]] = [[] for _ in range(1 << len(part.kept))]
    for v in g.nodes():
        if v not in cs:
            buckets[part.signature_index(g.neighbors(v))].append(v)
    return EquivalenceClassTable(
        part, tuple(len(b) for b in buckets), tuple(tuple(b) for b in buckets)
    )


def candidate_space_size(part_g: McisPartitioning, h_classes: int) -> int:
    """Exact size of the candidate search space we enumerate from."""
    c = len(part_g.to_cover)
    a = len(part_g.to_indep)
    return factorial(c) * h_classes ** a


def candidate_count_bound(tau: int) -> int:
    """Loose per-partitioning bound 2 tau^tau 2^(tau^2) on candidate mappings."""
    return tau ** tau * 2 * 2 ** (tau * tau)


def best_candidate(
    gv: CoverView,
    part_g: McisPartitioning,
    g_sizes: tuple[int, ...],
    hv: CoverView,
    part_h: McisPartitioning,
    h_sizes: tuple[int, ...],
) -> tuple[McisCandidate | None, int]:
    """First largest valid candidate for one pair of partitionings, in
    enumeration order, and the number of complete candidates examined."""
    c, a, b = len(part_g.to_cover), len(part_g.to_indep), len(part_h.to_indep)
    best: McisCandidate | None = None
    examined = 0
    if len(part_h.to_cover) != c:
        return best, examined
    # to_indep nodes must stay pairwise non-adjacent: their images are independent
    if any(gv.adjacent(x, y) for x, y in combinations(part_g.to_indep, 2)):
        return best, examined
    if any(hv.adjacent(x, y) for x, y in combinations(part_h.to_indep, 2)):
        return best, examined
    kept_g, kept_h = part_g.kept, part_h.kept
    pos_g = {v: i for i, v in enumerate(kept_g)}
    pos_h = {v: i for i, v in enumerate(kept_h)}
    for image in permutations(part_h.to_cover):
        pi = dict(zip(part_g.to_cover, image))
        if any(
            gv.adjacent(x, y) != hv.adjacent(pi[x], pi[y])
            for x, y in combinations(part_g.to_cover, 2)
        ):
            continue
        pinv = {w: v for v, w in pi.items()}
        # H group for each g to_indep node: cover part fixed by pi, indep part free
        options = []
        for x in part_g.to_indep:
            base = sum(1 << pos_h[pi[z]] for z in gv.cover if z in pi and gv.adjacent(x, z))
            opts = []
            for sub in range(1 << b):
                w = base | sum(1 << pos_h[y] for i, y in enumerate(part_h.to_indep) if sub >> i & 1)
                if h_sizes[w] > 0:
                    opts.append(w)
            options.append(opts)
        # G-side cover part of each h to_indep node's group is fixed by pi
        h_base = []
        for y in part_h.to_indep:
            h_base.append(sum(1 << pos_g[pinv[z]] for z in hv.cover if z in pinv and hv.adjacent(y, z)))
        used_h = [0] * len(h_sizes)
        choice = [0] * a

        def rec(i: int):
            nonlocal best, examined
            if i == a:
                examined += 1
                used_g = [0] * len(g_sizes)
                assign_h = []
                for j, y in enumerate(part_h.to_indep):
                    u = h_base[j] | sum(
                        1 << pos_g[x] for t, x in enumerate(part_g.to_indep)
                        if choice[t] >> pos_h[y] & 1
                    )
                    used_g[u] += 1
                    if used_g[u] > g_sizes[u]:
                        return
                    assign_h.append((y, u))
                extra = 0
                for sub in range(1 << c):
                    u = sum(1 << pos_g[z] for i2, z in enumerate(part_g.to_cover) if sub >> i2 & 1)
                    w = sum(1 << pos_h[pi[z]] for i2, z in enumerate(part_g.to_cover) if sub >> i2 & 1)
                    extra += min(g_sizes[u] - used_g[u], h_sizes[w] - used_h[w])
                size = c + a + b + extra
                if best is None or size > best.size:
                    best = McisCandidate(
                        tuple(sorted(pi.items())),
                        tuple(zip(part_g.to_indep, choice)),
                        tuple(assign_h),
                        size,
                    )
                return
            for w in options[i]:
                if used_h[w] < h_sizes[w]:
                    used_h[w] += 1
                    choice[i] = w
                    rec(i + 1)
                    used_h[w] -= 1

        rec(0)
    return best, examined


@dataclass(frozen=True)
class McisPlan:
    part_g: McisPartitioning
    part_h: McisPartitioning
    candidate: McisCandidate

    @property
    def size(self) -> int:
        return self.candidate.size


def h_partition_tables(h: Graph, cover_h) -> list[EquivalenceClassTable]:
    cover = tuple(sorted(cover_h))
    return [class_table(h, cover, p) for p in iter_partitionings(cover)]


def best_for_g_partition(
    gv: CoverView,
    part_g: McisPartitioning,
    g_sizes: tuple[int, ...],
    hv: CoverView,
    h_tables: list[EquivalenceClassTable],
    counters: McisCounters | None = None,
) -> McisPlan | None:
    """Best plan for a fixed G partitioning over every admissible H partitioning."""
    tau = max(len(gv.cover), len(hv.cover))
    best: McisPlan | None = None
    for table in h_tables:
        part_h = table.part
        if len(part_h.to_cover) != len(part_g.to_cover):
            continue
        cand, examined = best_candidate(gv, part_g, g_sizes, hv, part_h, table.sizes)
        if counters is not None:
            counters.partitionings += 1
            counters.candidates += examined
            counters.max_candidates_per_partitioning = max(
                counters.max_candidates_per_partitioning, examined
            )
            exact = candidate_space_size(part_g, 1 << len(part_h.kept))
            if examined > exact or examined > candidate_count_bound(tau):
                raise RuntimeError(f"{examined} candidates exceed the candidate bound {exact}")
            if counters.partitionings > 9 ** tau:
                raise RuntimeError("more partitionings examined than 9^tau")
        if cand is not None and (best is None or cand.size > best.size):
            best = McisPlan(part_g, part_h, cand)
    return best


def cover_image_signature(plan: McisPlan, u: int) -> int | None:
    """H signature matching G signature ``u`` when ``u`` only touches
    ``to_cover`` nodes; None when it touches a ``to_indep`` node."""
    kept_g, kept_h = plan.part_g.kept, plan.part_h.kept
    pi = dict(plan.candidate.cover_bijection)
    pos_h = {v: i for i, v in enumerate(kept_h)}
    w = 0
    for i, v in enumerate(kept_g):
        if u >> i & 1:
            if v not in pi:
                return None
            w |= 1 << pos_h[pi[v]]
    return w


def local_image(
    plan: McisPlan,
    h_members: tuple[tuple[int, ...], ...],
    node: int,
    signature: int | None,
    rank: int,
) -> int | None:
    """Image of one G node.

    Cover nodes pass ``signature=None``; independent nodes pass their class
    signature and their rank inside the class.  ``h_members`` lists each H
    class of ``plan.part_h`` in ascending id order.
    """
    cand = plan.candidate
    if signature is None:
        pi = dict(cand.cover_bijection)
        if node in pi:
            return pi[node]
        assign = dict(cand.class_assign_g)
        if node not in assign:
            return None
        w = assign[node]
        same = sorted(x for x, ww in cand.class_assign_g if ww == w)
        return h_members[w][same.index(node)]
    reps = sorted(y for y, u in cand.class_assign_h if u == signature)
    if rank < len(reps):
        return reps[rank]
    w = cover_image_signature(plan, signature)
    if w is None:
        return None
    used = sum(1 for _, ww in cand.class_assign_g if ww == w)
    j = used + rank - len(reps)
    return h_members[w][j] if j < len(h_members[w]) else None


def mcis_search(g: Graph, h: Graph, cover_g, cover_h, counters: McisCounters | None = None):
    """Best plan plus the G and H class tables it was found with."""
    gv, hv = CoverView.of(g, cover_g), CoverView.of(h, cover_h)
    h_tables = h_partition_tables(h, hv.cover)
    best: McisPlan | None = None
    best_tables = None
    for part_g in iter_partitionings(gv.cover):
        g_table = class_table(g, gv.cover, part_g)
        plan = best_for_g_partition(gv, part_g, g_table.sizes, hv, h_tables, counters)
        if plan is not None and (best is None or plan.size > best.size):
            best = plan
            best_tables = g_table, next(t for t in h_tables if t.part == plan.part_h)
    assert best is not None  # dropping every cover node is always admissible
    return best, best_tables
