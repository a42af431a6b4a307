"""Markov-blanket recovery and the incremental permutation scorer.

The scorer keeps, for one mutable permutation, each variable's blanket within
its prefix and the corresponding local score, updating only the variables
whose prefixes change on a move. Bookmarks snapshot the full state.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Dag
from .sources import SourceError

__all__ = [
    "grow_shrink_mb",
    "verma_pearl_parents",
    "BlanketScorer",
    "Scorer",
]

_MAX_GROW_SHRINK_PASSES = 1000


def _grow_shrink_score(source, v: int, prefix: frozenset) -> frozenset:
    mb: set = set()
    s0 = source.local_bic(v, frozenset())
    while True:
        changed = False
        # Grow: strict improvement, best candidate, lowest index on ties.
        while True:
            best, best_s = None, s0
            for y in sorted(prefix - mb):
                s = source.local_bic(v, frozenset(mb | {y}))
                if s < best_s:
                    best, best_s = y, s
            if best is None:
                break
            mb.add(best)
            s0 = best_s
            changed = True
        # Shrink: removal allowed on ties, best removal, lowest index on ties.
        while True:
            best, best_s = None, float("inf")
            for y in sorted(mb):
                s = source.local_bic(v, frozenset(mb - {y}))
                if s <= s0 and s < best_s:
                    best, best_s = y, s
            if best is None:
                break
            mb.discard(best)
            s0 = best_s
            changed = True
        if not changed:
            return frozenset(mb)


def _grow_shrink_ci(source, v: int, prefix: frozenset) -> frozenset:
    mb: set = set()
    seen = set()
    for _ in range(_MAX_GROW_SHRINK_PASSES):
        changed = False
        grown = True
        while grown:
            grown = False
            for y in sorted(prefix - mb):
                if not source.independent(v, y, frozenset(mb)):
                    mb.add(y)
                    grown = changed = True
                    break
        shrunk = True
        while shrunk:
            shrunk = False
            for y in sorted(mb):
                if source.independent(v, y, frozenset(mb - {y})):
                    mb.discard(y)
                    shrunk = changed = True
                    break
        state = frozenset(mb)
        if not changed or state in seen:
            return state
        seen.add(state)
    return frozenset(mb)


def grow_shrink_mb(source, v: int, prefix) -> frozenset:
    """Blanket of v within the prefix by iterated grow-shrink.

    Score sources grow on strict score improvement and shrink on ties;
    CI sources add dependents and remove members independent given the rest.
    Grow and shrink alternate until a full pass changes nothing.
    """
    prefix = frozenset(prefix)
    if v in prefix:
        raise SourceError("variable may not appear in its own prefix")
    if not prefix:
        return frozenset()
    if source.is_score_based:
        return _grow_shrink_score(source, v, prefix)
    return _grow_shrink_ci(source, v, prefix)


def verma_pearl_parents(source, v: int, prefix) -> frozenset:
    """Parents of v: prefix members dependent on v given the rest of the prefix."""
    prefix = frozenset(prefix)
    if v in prefix:
        raise SourceError("variable may not appear in its own prefix")
    if source.is_score_based:
        raise SourceError("all-prefix parent recovery needs a CI-capable source")
    return frozenset(
        y for y in prefix if not source.independent(v, y, prefix - {y})
    )


class BlanketScorer:
    """Caches blanket and local-score queries keyed by (variable, prefix set).

    Valid combinations: score_kind 'edge' with any source, 'bic' with a
    score-capable source; method 'vermaPearl' needs a CI-capable source.
    """

    def __init__(self, source, method: str = "growShrink",
                 score_kind: str = "edge", caching: bool = True):
        if method not in ("growShrink", "vermaPearl"):
            raise SourceError(f"unknown parent-recovery method {method!r}")
        if score_kind not in ("edge", "bic"):
            raise SourceError(f"unknown score kind {score_kind!r}")
        if score_kind == "bic" and not source.is_score_based:
            raise SourceError("bic scoring needs a score-capable source")
        if method == "vermaPearl" and source.is_score_based:
            raise SourceError("vermaPearl needs a CI-capable source")
        self.source = source
        self.method = method
        self.score_kind = score_kind
        self.caching = caching
        # Keyed by (variable, prefix bitmask); int keys hash in constant time
        # where frozenset keys cost a pass over the prefix.
        self._cache: dict = {}
        # Comparison slack: exact for edge counts, small for real scores.
        self.tol = 0 if score_kind == "edge" else 1e-9

    @property
    def num_vars(self) -> int:
        return self.source.num_vars

    @property
    def variables(self):
        return self.source.variables

    def blanket(self, v: int, prefix: frozenset) -> frozenset:
        mask = 0
        for y in prefix:
            mask |= 1 << y
        return self.blanket_masked(v, mask, prefix)

    def blanket_masked(self, v: int, mask: int,
                       prefix: frozenset | None = None) -> frozenset:
        """Blanket lookup keyed by the prefix bitmask; the prefix set is only
        materialized on a cache miss."""
        key = (v, mask)
        if self.caching:
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        if prefix is None:
            prefix = frozenset(
                y for y in range(self.num_vars) if mask >> y & 1
            )
        if self.method == "growShrink":
            mb = grow_shrink_mb(self.source, v, prefix)
        else:
            mb = verma_pearl_parents(self.source, v, prefix)
        if self.caching:
            self._cache[key] = mb
        return mb

    def local_score(self, v: int, prefix: frozenset):
        mb = self.blanket(v, prefix)
        if self.score_kind == "edge":
            return len(mb)
        return self.source.local_bic(v, mb)

    def local_score_masked(self, v: int, mask: int):
        mb = self.blanket_masked(v, mask)
        if self.score_kind == "edge":
            return len(mb)
        return self.source.local_bic(v, mb)


class Scorer:
    """Mutable permutation state with incremental rescoring and bookmarks."""

    def __init__(self, blanket_scorer: BlanketScorer, order=None):
        self.bs = blanket_scorer
        n = blanket_scorer.num_vars
        if order is None:
            order = list(range(n))
        if sorted(order) != list(range(n)):
            raise SourceError("order must be a permutation of the variable indices")
        self.order = list(order)
        self._mb: list[frozenset] = [frozenset()] * n
        self._local = [0] * n
        self._bookmarks: dict = {}
        self._rescore_range(0, n - 1)

    @property
    def num_vars(self) -> int:
        return len(self.order)

    def position(self, v: int) -> int:
        return self.order.index(v)

    def _rescore_range(self, lo: int, hi: int) -> None:
        mask = 0
        for v in self.order[:lo]:
            mask |= 1 << v
        bs = self.bs
        edge = bs.score_kind == "edge"
        for pos in range(lo, hi + 1):
            v = self.order[pos]
            mb = bs.blanket_masked(v, mask)
            self._mb[v] = mb
            self._local[v] = len(mb) if edge else bs.source.local_bic(v, mb)
            mask |= 1 << v

    def total(self):
        """Current score; summed fresh over variables so equal states always
        report bit-identical totals."""
        return sum(self._local[v] for v in range(self.num_vars))

    def blanket_of(self, v: int) -> frozenset:
        return self._mb[v]

    def adjacent(self, a: int, b: int) -> bool:
        return b in self._mb[a] or a in self._mb[b]

    def move_position(self, src: int, dst: int) -> None:
        """Move the variable at position src to position dst; rescore only the
        positions whose prefixes changed."""
        if src == dst:
            return
        v = self.order.pop(src)
        self.order.insert(dst, v)
        self._rescore_range(min(src, dst), max(src, dst))

    def relocate(self, v: int, dst: int):
        """Move variable v to position dst; returns the new total score."""
        if not 0 <= dst < self.num_vars:
            raise SourceError(f"target index {dst} out of bounds")
        self.move_position(self.position(v), dst)
        return self.total()

    def swap_positions(self, i: int, j: int) -> None:
        if i == j:
            return
        lo, hi = min(i, j), max(i, j)
        self.order[lo], self.order[hi] = self.order[hi], self.order[lo]
        self._rescore_range(lo, hi)

    def bookmark(self, label) -> None:
        self._bookmarks[label] = (
            list(self.order), list(self._mb), list(self._local)
        )

    def restore(self, label) -> None:
        try:
            order, mb, local = self._bookmarks[label]
        except KeyError:
            raise SourceError(f"unknown bookmark label {label!r}") from None
        self.order = list(order)
        self._mb = list(mb)
        self._local = list(local)

    def build_dag(self) -> Dag:
        """DAG implied by the current permutation; acyclic by construction."""
        return Dag(
            tuple(self.bs.variables),
            tuple(self._mb[v] for v in range(self.num_vars)),
        )
