"""Induced tree detection on bounded-degeneracy graphs.

Both detectors first orient the graph by peeling, then run many proper checks
side by side: one check per bit position of a message.  The randomized one
draws its colorings at random; the deterministic one walks through a shared
coloring family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..graphs import Graph, PatternGraph, as_graph
from ..sim import GeneratorProgram, NodeContext, decode_uint, encode_uint
from .coloring_family import ColoringFamily, build_coloring_family
from .orientation import orientation_phase, peel_threshold, phase_bound
from .proper import LabeledTree, exchange_width, label_tree_bottom_up, proper_check_phase

__all__ = [
    "trial_count",
    "DetectionOutput",
    "RandomTreeDetector",
    "induced_tree_random",
    "DerandomizedTreeDetector",
    "induced_tree_derandomized",
    "RANDOM_EPSILON",
    "DETERMINISTIC_EPSILON",
]

# (2+eps)d equals 5d, the separation constant used for random colorings
RANDOM_EPSILON = 3.0
# keeps floor((2+eps)d) at 2d for d <= 3
DETERMINISTIC_EPSILON = 0.25
MESSAGE_WORDS = 8


def trial_count(alpha: int, k: int, confidence: float) -> int:
    """Repetitions ``ceil(2^(alpha*k) * k^k * ln(1/(1-confidence)))``."""
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie strictly between 0 and 1")
    return math.ceil(2 ** (alpha * k) * k ** k * math.log(1 / (1 - confidence)))


@dataclass(frozen=True)
class DetectionOutput:
    report: bool
    layer: int
    out_degree: int
    checks: int  # proper checks this node took part in

    def line(self) -> str:
        return f"report:{int(self.report)}"

    def __bool__(self) -> bool:
        return self.report


def _as_labeled(t: Graph | PatternGraph | LabeledTree) -> LabeledTree:
    return t if isinstance(t, LabeledTree) else label_tree_bottom_up(as_graph(t))


class RandomTreeDetector(GeneratorProgram):
    """Random separation: each check colors a node 0 with probability 1/2 and
    otherwise uniformly in ``1..k``.  With ``d`` unknown the orientation uses
    the doubling variant and each node sizes its repetitions from the largest
    out-degree within distance ``k``."""

    message_words = MESSAGE_WORDS

    def __init__(self, t, d: int | None, confidence: float = 0.99,
                 alpha: int | None = None, epsilon: float | None = None) -> None:
        self.t = _as_labeled(t)
        self.d = d
        self.confidence = confidence
        if epsilon is None:
            epsilon = RANDOM_EPSILON if d is not None else 1.0
        self.epsilon = epsilon
        if d is not None:
            self.alpha = alpha if alpha is not None else 5 * d
            self.trials: int | None = trial_count(self.alpha, self.t.k, confidence)
        else:
            self.alpha = alpha
            self.trials = None

    def body(self, ctx: NodeContext):
        k = self.t.k
        orient = yield from orientation_phase(ctx, self.d, self.epsilon, synchronize=True)
        trials = self.trials
        if trials is None:
            width = ctx.id_bits
            proxy = len(orient.out_neighbors)
            for _ in range(k):
                inbox = yield encode_uint(proxy, width)
                proxy = max([proxy] + [decode_uint(m) for m in inbox.values()])
            trials = trial_count(proxy, k, self.confidence)
        batch = ctx.bandwidth_bits
        report = False
        done = 0
        while done < trials:
            size = min(batch, trials - done)
            colors = [
                0 if ctx.rng.random() < 0.5 else ctx.rng.randint(1, k) for _ in range(size)
            ]
            accept = yield from proper_check_phase(ctx, self.t, orient.out_neighbors, colors)
            report = report or bool(accept)
            done += size
        return DetectionOutput(report, orient.layer, len(orient.out_neighbors), trials)


def induced_tree_random(t, d: int | None, confidence: float = 0.99, **kw) -> RandomTreeDetector:
    return RandomTreeDetector(t, d, confidence, **kw)


class DerandomizedTreeDetector(GeneratorProgram):
    """Walks through a coloring family shared by all nodes.  Colors of
    neighbours follow from their ids, so no color exchange is needed."""

    message_words = MESSAGE_WORDS

    def __init__(self, t, d: int, n_ids: int, epsilon: float = DETERMINISTIC_EPSILON,
                 *, override_scale: bool = False) -> None:
        self.t = _as_labeled(t)
        self.d = d
        self.epsilon = epsilon
        self.alpha = peel_threshold(d, epsilon)
        self.n_ids = n_ids
        self.family: ColoringFamily = build_coloring_family(
            n_ids, self.t.k, self.alpha, override_scale=override_scale
        )

    def round_bound(self, batch: int, n: int) -> int:
        """Orientation rounds plus one proper check per batch."""
        checks = math.ceil(len(self.family) / batch)
        return phase_bound(n, self.epsilon) + 1 + checks * self.t.k

    def body(self, ctx: NodeContext):
        if ctx.n_upper_bound > self.n_ids or any(u >= self.n_ids for u in ctx.neighbor_ids):
            raise ValueError("identifiers must lie below the family's N")
        orient = yield from orientation_phase(ctx, self.d, self.epsilon, synchronize=True)
        fam = self.family.colorings
        batch = ctx.bandwidth_bits
        report = False
        for start in range(0, len(fam), batch):
            chunk = fam[start:start + batch]
            colors = [c[ctx.node_id] for c in chunk]
            nbr = {u: [c[u] for c in chunk] for u in ctx.neighbor_ids}
            accept = yield from proper_check_phase(ctx, self.t, orient.out_neighbors, colors, nbr)
            report = report or bool(accept)
        return DetectionOutput(report, orient.layer, len(orient.out_neighbors), len(fam))


def induced_tree_derandomized(t, d: int, n_ids: int, **kw) -> DerandomizedTreeDetector:
    return DerandomizedTreeDetector(t, d, n_ids, **kw)


def random_round_estimate(trials: int, k: int, batch: int) -> int:
    """Rounds spent on proper checks for ``trials`` repetitions."""
    return math.ceil(trials / batch) * (exchange_width(k) + k)
