"""Deterministic coloring families that separate a k-set from an avoid-set.

A family over ids ``0..N-1`` is *separating* for ``(k, alpha)`` when, for
every k-set ``S``, every bijection ``b: S -> {1..k}`` and every set ``T``
of ``min(alpha*k, N-k)`` ids disjoint from ``S``, some member colors ``S`` as
``b`` and all of ``T`` with 0.

The family of every injective coloring of every k-set (all other ids 0)
always separates.  A greedy set cover over the (S, b, T) triples is tried
first: each step builds candidate colorings around the first uncovered triple
and keeps the one covering most triples.  The greedy run is abandoned once it
reaches the size of the injective family, and skipped when a counting bound
shows it cannot win or when the triple table would be too large.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from math import comb

import numpy as np

from ..graphs import ScaleError

__all__ = ["ColoringFamily", "build_coloring_family", "FAMILY_MAX_N", "FAMILY_MAX_SPAN"]

FAMILY_MAX_N = 30
FAMILY_MAX_SPAN = 10  # bound on k + alpha*k outside the saturated case
_POOL = 12
_MAX_TRIPLES = 5_000_000


@dataclass(frozen=True)
class ColoringFamily:
    n_ids: int
    k: int
    alpha: int
    colorings: tuple[tuple[int, ...], ...]

    @property
    def avoid_size(self) -> int:
        return min(self.alpha * self.k, self.n_ids - self.k)

    def __len__(self) -> int:
        return len(self.colorings)

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.colorings[i]

    def covers(self, s, b, t) -> bool:
        """Whether some member colors ``s[i]`` with ``b[i]`` and ``t`` with 0."""
        return any(
            all(c[v] == x for v, x in zip(s, b)) and all(c[v] == 0 for v in t)
            for c in self.colorings
        )

    def verify_exhaustive(self) -> list[tuple]:
        """Every uncovered (S, b, T) triple, found by direct enumeration."""
        n, k, size = self.n_ids, self.k, self.avoid_size
        zero_masks: dict[tuple, list[int]] = {}
        for c in self.colorings:
            z = sum(1 << v for v in range(n) if c[v] == 0)
            classes = [[v for v in range(n) if c[v] == col] for col in range(1, k + 1)]
            if any(not cl for cl in classes):
                continue
            for pick in _product(classes):
                key = tuple(sorted(zip(pick, range(1, k + 1))))
                zero_masks.setdefault(key, []).append(z)
        missing = []
        for s in combinations(range(n), k):
            rest = [v for v in range(n) if v not in s]
            for perm in permutations(range(1, k + 1)):
                key = tuple(sorted(zip(s, perm)))
                masks = zero_masks.get(key, [])
                for t in combinations(rest, size):
                    tm = sum(1 << v for v in t)
                    if not any(tm & ~z == 0 for z in masks):
                        missing.append((s, perm, t))
        return missing


def _product(classes):
    if not classes:
        yield ()
        return
    for v in classes[0]:
        for rest in _product(classes[1:]):
            yield (v,) + rest


def _check_params(n: int, k: int, alpha: int, override: bool) -> None:
    if k < 1:
        raise ValueError("k must be at least 1")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if n < k:
        raise ValueError("need at least k identifiers")
    if override:
        return
    saturated = k + alpha * k >= n
    if n > FAMILY_MAX_N or not (saturated or k + alpha * k <= FAMILY_MAX_SPAN):
        raise ScaleError(
            f"coloring family limited to N <= {FAMILY_MAX_N} and "
            f"k + alpha*k <= {FAMILY_MAX_SPAN} (or k + alpha*k >= N); got N={n}, k={k}, alpha={alpha}"
        )


def build_coloring_family(n_ids: int, k: int, alpha: int, *, override_scale: bool = False) -> ColoringFamily:
    _check_params(n_ids, k, alpha, override_scale)
    return _build(n_ids, k, alpha)


def _injective_family(n: int, k: int) -> list[tuple[int, ...]]:
    members = []
    for s in combinations(range(n), k):
        for perm in permutations(range(1, k + 1)):
            c = [0] * n
            for v, x in zip(s, perm):
                c[v] = x
            members.append(tuple(c))
    return members


def _max_gain(n: int, k: int, size: int) -> int:
    """Most triples a single coloring can cover (over its class sizes)."""
    best = 0

    def rec(i: int, used: int, prod: int) -> None:
        nonlocal best
        if i == k:
            best = max(best, prod * comb(n - used, size))
            return
        for x in range(1, n - used - (k - i - 1) + 1):
            rec(i + 1, used + x, prod * x)

    rec(0, 0, 1)
    return best


@lru_cache(maxsize=None)
def _build(n: int, k: int, alpha: int) -> ColoringFamily:
    size = min(alpha * k, n - k)
    injective = _injective_family(n, k)
    triples = len(injective) * comb(n - k, size)
    if size < n - k and triples <= _MAX_TRIPLES:
        lower = -(-triples // _max_gain(n, k, size))
        if lower < len(injective):
            greedy = _GreedyCover(n, k, size).run(budget=len(injective) - 1)
            if greedy is not None:
                return ColoringFamily(n, k, alpha, tuple(greedy))
    return ColoringFamily(n, k, alpha, tuple(injective))


class _GreedyCover:
    def __init__(self, n: int, k: int, size: int) -> None:
        self.n, self.k, self.size = n, k, size
        self.sets = list(combinations(range(n), k))
        self.set_index = {s: i for i, s in enumerate(self.sets)}
        self.perms = list(permutations(range(1, k + 1)))
        self.perm_index = {p: i for i, p in enumerate(self.perms)}
        m = n - k
        self.t_count = comb(m, size)
        # colex rank table: binom[p, i] = C(p, i)
        self.binom = np.array([[comb(p, i) for i in range(size + 2)] for p in range(n + 1)],
                              dtype=np.int64)
        # position of each id inside the complement of each S (-1 if in S)
        pos = np.full((len(self.sets), n), -1, dtype=np.int64)
        for si, s in enumerate(self.sets):
            j = 0
            for v in range(n):
                if v not in s:
                    pos[si, v] = j
                    j += 1
        self.pos = pos
        self.uncovered = np.ones((len(self.sets) * len(self.perms), self.t_count), dtype=bool)
        self.left = self.uncovered.size
        self.rng = random.Random(f"family/{n}/{k}/{size}")
        self._subsets_cache: dict[int, np.ndarray] = {}

    def _subsets(self, zmask: int) -> np.ndarray:
        arr = self._subsets_cache.get(zmask)
        if arr is None:
            zs = [v for v in range(self.n) if zmask >> v & 1]
            arr = np.array(list(combinations(zs, self.size)), dtype=np.int64).reshape(-1, self.size)
            if len(self._subsets_cache) < 4096:
                self._subsets_cache[zmask] = arr
        return arr

    def _targets(self, coloring: list[int]):
        """Rows and T-ranks covered by ``coloring``."""
        classes = [[v for v in range(self.n) if coloring[v] == c] for c in range(1, self.k + 1)]
        if any(not cl for cl in classes):
            return []
        zmask = sum(1 << v for v in range(self.n) if coloring[v] == 0)
        subs = self._subsets(zmask)
        if subs.shape[0] == 0:
            return []
        cols = np.arange(self.size)
        out = []
        for pick in _product(classes):
            order = sorted(range(self.k), key=lambda i: pick[i])
            s = tuple(pick[i] for i in order)
            perm = tuple(i + 1 for i in order)
            si = self.set_index[s]
            row = si * len(self.perms) + self.perm_index[perm]
            p = self.pos[si][subs]  # positions are increasing along each row
            ranks = self.binom[p, cols + 1].sum(axis=1)
            out.append((row, ranks))
        return out

    def _gain(self, targets) -> int:
        return int(sum(self.uncovered[row, ranks].sum() for row, ranks in targets))

    def _first_uncovered(self):
        flat = int(np.argmax(self.uncovered))
        row, rank = divmod(flat, self.t_count)
        si, pi = divmod(row, len(self.perms))
        s = self.sets[si]
        rest = [v for v in range(self.n) if v not in s]
        t = _unrank(rank, self.size, rest)
        return s, self.perms[pi], t

    def run(self, budget: int) -> list[tuple[int, ...]] | None:
        family: list[tuple[int, ...]] = []
        while self.left:
            if len(family) >= budget:
                return None
            s, perm, t = self._first_uncovered()
            free = [v for v in range(self.n) if v not in s and v not in t]
            best = None
            best_gain = -1
            for trial in range(_POOL):
                c = [0] * self.n
                for v, x in zip(s, perm):
                    c[v] = x
                # trial 0 keeps everything else at 0; later trials add colored nodes
                density = trial / _POOL
                for v in free:
                    if self.rng.random() < density:
                        c[v] = self.rng.randint(1, self.k)
                targets = self._targets(c)
                gain = self._gain(targets)
                if gain > best_gain:
                    best, best_gain, best_targets = c, gain, targets
            assert best is not None and best_gain > 0
            for row, ranks in best_targets:
                self.uncovered[row, ranks] = False
            self.left -= best_gain
            family.append(tuple(best))
        return family


def _unrank(rank: int, size: int, universe: list[int]) -> tuple[int, ...]:
    """Inverse of the colex rank over positions in ``universe``."""
    out = []
    for i in range(size, 0, -1):
        p = i - 1
        while comb(p + 1, i) <= rank:
            p += 1
        rank -= comb(p, i)
        out.append(universe[p])
    return tuple(sorted(out))
