"""Two-party disjointness inputs and the lower-bound instances built from them."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator

from .graphs import Coloring, Graph, GraphError, PatternGraph

__all__ = [
    "DisjointnessInput",
    "PredicateSpec",
    "LowerBoundInstance",
    "all_inputs",
    "random_input",
    "crossing_edges",
]


@dataclass(frozen=True)
class DisjointnessInput:
    """Bit vectors ``x0, x1``.  With ``shape="square"`` index ``a*N + b``
    stands for the pair ``(a, b)``; with ``shape="flat"`` indices are used as is."""

    x0: tuple[int, ...]
    x1: tuple[int, ...]
    n: int
    shape: str = "square"

    def __post_init__(self) -> None:
        object.__setattr__(self, "x0", tuple(int(b) for b in self.x0))
        object.__setattr__(self, "x1", tuple(int(b) for b in self.x1))
        if self.shape not in ("square", "flat"):
            raise GraphError(f"unknown index shape {self.shape!r}")
        if len(self.x0) != len(self.x1):
            raise GraphError("x0 and x1 must have equal length")
        if len(self.x0) != self.length(self.n, self.shape):
            raise GraphError(f"{self.shape} inputs for N={self.n} need {self.length(self.n, self.shape)} bits")
        if any(b not in (0, 1) for b in self.x0 + self.x1):
            raise GraphError("inputs must be bit vectors")

    @staticmethod
    def length(n: int, shape: str) -> int:
        return n * n if shape == "square" else n

    def bits(self, side: int) -> tuple[int, ...]:
        return self.x0 if side == 0 else self.x1

    def pair(self, index: int) -> tuple[int, int]:
        return divmod(index, self.n)

    def intersects(self) -> bool:
        return any(a and b for a, b in zip(self.x0, self.x1))

    def hex(self) -> tuple[str, str]:
        return _to_hex(self.x0), _to_hex(self.x1)

    @classmethod
    def from_hex(cls, x0: str, x1: str, n: int, shape: str = "square") -> "DisjointnessInput":
        m = cls.length(n, shape)
        return cls(_from_hex(x0, m), _from_hex(x1, m), n, shape)


def _to_hex(bits: tuple[int, ...]) -> str:
    value = sum(b << i for i, b in enumerate(bits))
    return format(value, "x")


def _from_hex(text: str, m: int) -> tuple[int, ...]:
    value = int(text, 16) if text else 0
    if value >> m:
        raise GraphError(f"hex input {text!r} has more than {m} bits")
    return tuple(value >> i & 1 for i in range(m))


def all_inputs(n: int, shape: str = "square") -> Iterator[DisjointnessInput]:
    m = DisjointnessInput.length(n, shape)
    for x0 in product((0, 1), repeat=m):
        for x1 in product((0, 1), repeat=m):
            yield DisjointnessInput(x0, x1, n, shape)


def random_input(n: int, shape: str, rng: random.Random, p: float = 0.3) -> DisjointnessInput:
    m = DisjointnessInput.length(n, shape)
    return DisjointnessInput(
        tuple(int(rng.random() < p) for _ in range(m)),
        tuple(int(rng.random() < p) for _ in range(m)),
        n,
        shape,
    )


@dataclass(frozen=True)
class PredicateSpec:
    pattern: PatternGraph
    induced: bool
    multicolored: bool = False
    name: str = ""

    def describe(self) -> str:
        kind = "induced" if self.induced else "subgraph"
        extra = " multicolored" if self.multicolored else ""
        return f"{self.name or 'pattern'} k={self.pattern.k} {kind}{extra}"


@dataclass(frozen=True)
class LowerBoundInstance:
    """A graph built from a disjointness input, split between two players.

    ``controlled`` maps every edge whose presence depends on an input bit,
    present or not, to ``(side, index)``; the edge exists exactly when that
    bit is 1.  ``expected`` is True when the inputs intersect, which is when
    the predicate should hold.
    """

    graph: Graph
    v0: frozenset[int]
    v1: frozenset[int]
    cut: tuple[tuple[int, int], ...]
    disj: DisjointnessInput
    predicate: PredicateSpec
    expected: bool
    declared_cut: int
    controlled: dict[tuple[int, int], tuple[int, int]] = field(compare=False)
    family: str = ""
    coloring: Coloring | None = None
    params: dict = field(default_factory=dict, compare=False)

    def structural_problems(self) -> list[tuple[str, str]]:
        """``(clause, message)`` for each violated partition, cut or locality
        condition; empty when everything holds."""
        g = self.graph
        problems = []
        if self.v0 & self.v1:
            problems.append(("partition", "sides overlap"))
        if self.v0 | self.v1 != set(g.nodes()):
            problems.append(("partition", "sides do not cover every node"))
        crossing = crossing_edges(g, self.v0)
        if sorted(self.cut) != list(crossing):
            problems.append(("partition", f"recorded cut differs from the crossing edges "
                             f"({len(self.cut)} recorded, {len(crossing)} crossing)"))
        if len(crossing) != self.declared_cut:
            problems.append(("cut-size", f"cut has {len(crossing)} edges, declared {self.declared_cut}"))
        if self.expected != self.disj.intersects():
            problems.append(("predicate", "expected flag disagrees with the inputs"))
        for (u, v), (side, idx) in sorted(self.controlled.items()):
            home = self.v0 if side == 0 else self.v1
            if u not in home or v not in home:
                problems.append(("locality", f"edge {u}-{v} depends on x{side} but leaves side {side}"))
            if g.has_edge(u, v) != bool(self.disj.bits(side)[idx]):
                problems.append(("locality", f"edge {u}-{v} disagrees with x{side}[{idx}]"))
        return problems

    def side_of(self, v: int) -> int:
        return 0 if v in self.v0 else 1

    def sidecar(self) -> list[str]:
        """Records appended to the graph text format."""
        h0, h1 = self.disj.hex()
        lines = [
            f"family {self.family}",
            f"disj N={self.disj.n} shape={self.disj.shape} x0={h0} x1={h1}",
            f"predicate {self.predicate.describe()}",
            f"expected {int(self.expected)}",
            f"declared_cut {self.declared_cut}",
            "side " + " ".join(str(self.side_of(v)) for v in self.graph.nodes()),
            "cut " + " ".join(f"{u}-{v}" for u, v in self.cut),
            "params " + json.dumps(self.params, sort_keys=True),
        ]
        if self.coloring is not None:
            lines.append("coloring " + " ".join(map(str, self.coloring.color_of)))
        return lines


def crossing_edges(g: Graph, v0) -> tuple[tuple[int, int], ...]:
    v0 = set(v0)
    return tuple(sorted((u, v) for u, v in g.edges if (u in v0) != (v in v0)))
