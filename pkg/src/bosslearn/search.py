"""Permutation search: single-variable relocation sweeps, the two-step
triangle-swap escape, and the exhaustive sparsest-permutation oracle."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .graph import Cpdag, Dag, dag_to_cpdag
from .scorer import BlanketScorer, Scorer
from .sources import SourceError

__all__ = ["SearchConfig", "SearchResult", "SpResult", "best_move", "boss",
           "two_step", "sp", "SP_DEFAULT_CAP"]

SP_DEFAULT_CAP = 9


@dataclass(frozen=True)
class SearchConfig:
    score_kind: str = "edge"
    use_two_step: bool = True
    left_only: bool = False
    max_outer_iterations: int = 10000
    escape_budget: int = 300
    seed: int = 0
    caching: bool = True
    method: str = "growShrink"

    def __post_init__(self):
        if self.max_outer_iterations < 1:
            raise SourceError("max_outer_iterations must be at least 1")


@dataclass(frozen=True)
class SearchResult:
    final_order: tuple[str, ...]
    dag: Dag
    cpdag: Cpdag
    final_score: float
    move_count: int
    elapsed: float


@dataclass(frozen=True)
class SpResult:
    """Exhaustive-search outcome: the minimum, its first attaining permutation,
    and the full set of minimizing patterns."""

    score: float
    permutation: tuple[str, ...]
    dag: Dag
    cpdag: Cpdag
    minimizing_cpdags: frozenset
    num_minimizing_permutations: int
    elapsed: float


def best_move(scorer: Scorer, v: int, left_only: bool = False) -> bool:
    """Relocate v to its score-minimizing position.

    Positions are scanned by placing v last (or leaving it in place when only
    left moves are allowed) and sliding left one index at a time; the
    candidate is updated only on a strictly lower score, so the right-most
    minimizing position wins. The variable can therefore relocate sideways
    when its original position ties the minimum, which lets sweeps wander
    across equal-score orders. Returns True iff the order changed.
    """
    n = scorer.num_vars
    i = scorer.position(v)
    tol = scorer.bs.tol
    label = ("_best_move", v)
    scorer.bookmark(label)
    if left_only:
        target = i
        best = scorer.total()
        start = i
    else:
        scorer.move_position(i, n - 1)
        target = n - 1
        best = scorer.total()
        start = n - 1
    for j in range(start - 1, -1, -1):
        scorer.swap_positions(j, j + 1)
        s = scorer.total()
        if s < best - tol:
            best = s
            target = j
    scorer.restore(label)
    if target != i:
        scorer.move_position(i, target)
        return True
    return False


def two_step(scorer: Scorer, visited: set, collect: list | None = None) -> bool:
    """Try one triangle swap: for v and a pair to its right forming a triangle
    in the built DAG, move both pair members in front of v.

    Accepts on a strictly lower score, or on an equal score when the
    resulting permutation has not been visited; the visited set is the
    caller's loop protection for sideways moves. Returns True on first
    acceptance. When `collect` is given, equal-score permutations are
    appended to it instead of being accepted, so only strict improvements
    move the scorer.
    """
    n = scorer.num_vars
    tol = scorer.bs.tol
    base = scorer.total()
    label = "_two_step"
    for pi in range(n):
        v = scorer.order[pi]
        for i1 in range(pi + 1, n):
            r1 = scorer.order[i1]
            if not scorer.adjacent(v, r1):
                continue
            for i2 in range(i1 + 1, n):
                r2 = scorer.order[i2]
                if not (scorer.adjacent(v, r2) and scorer.adjacent(r1, r2)):
                    continue
                scorer.bookmark(label)
                scorer.swap_positions(pi, i1)   # v <-> r1
                scorer.swap_positions(i1, i2)   # v <-> r2
                s = scorer.total()
                if s < base - tol:
                    return True
                if abs(s - base) <= tol and tuple(scorer.order) not in visited:
                    if collect is None:
                        return True
                    collect.append(tuple(scorer.order))
                scorer.restore(label)
    return False


def _escape_plateau(scorer: Scorer, visited: set, budget: int, rng,
                    left_only: bool = False):
    """Walk over equal-score orders reachable by single relocations and
    triangle swaps, looking for a strict improvement.

    The frontier order to expand next is drawn at random, which spreads the
    exploration over the plateau instead of tunneling down one corner.
    Explores at most `budget` orders, never mutates the caller's scorer, and
    returns a fresh Scorer at the first strictly better order found (None
    when the plateau dead-ends or the budget runs out). `visited` records
    expanded orders and is shared across calls at the same score level.
    """
    n = scorer.num_vars
    tol = scorer.bs.tol
    base = scorer.total()
    label = "_escape"
    stack = [tuple(scorer.order)]
    visited.discard(stack[0])
    expanded = 0
    while stack and expanded < budget:
        if len(stack) > 1:
            k = int(rng.integers(len(stack)))
            stack[k], stack[-1] = stack[-1], stack[k]
        cur = stack.pop()
        if cur in visited:
            continue
        visited.add(cur)
        expanded += 1
        sc = Scorer(scorer.bs, list(cur))
        for v in range(n):
            i = sc.position(v)
            sc.bookmark(label)
            if left_only:
                positions = range(i - 1, -1, -1)
            else:
                sc.move_position(i, n - 1)
                s = sc.total()
                if s < base - tol:
                    return sc
                if abs(s - base) <= tol and tuple(sc.order) not in visited:
                    stack.append(tuple(sc.order))
                positions = range(n - 2, -1, -1)
            for j in positions:
                sc.swap_positions(j, j + 1)
                s = sc.total()
                if s < base - tol:
                    return sc
                if abs(s - base) <= tol and tuple(sc.order) not in visited:
                    stack.append(tuple(sc.order))
            sc.restore(label)
        for pi in range(n):
            v = sc.order[pi]
            for i1 in range(pi + 1, n):
                r1 = sc.order[i1]
                if not sc.adjacent(v, r1):
                    continue
                for i2 in range(i1 + 1, n):
                    r2 = sc.order[i2]
                    if not (sc.adjacent(v, r2) and sc.adjacent(r1, r2)):
                        continue
                    sc.bookmark(label)
                    sc.swap_positions(pi, i1)
                    sc.swap_positions(i1, i2)
                    s = sc.total()
                    if s < base - tol:
                        return sc
                    if abs(s - base) <= tol and tuple(sc.order) not in visited:
                        stack.append(tuple(sc.order))
                    sc.restore(label)
    return None


def boss(source, config: SearchConfig = SearchConfig(),
         initial_order=None) -> SearchResult:
    """Best-order score search: relocation sweeps to a fixpoint, then the
    two-step escape, repeated until neither phase changes anything.

    initial_order may be a sequence of variable indices, the string
    "shuffle" for a seeded random start, or None for the given variable order.
    """
    n = source.num_vars
    if n < 1:
        raise SourceError("search needs at least one variable")
    if initial_order is None:
        order = list(range(n))
    elif isinstance(initial_order, str):
        if initial_order != "shuffle":
            raise SourceError(f"unknown initial order {initial_order!r}")
        order = list(np.random.default_rng(config.seed).permutation(n))
    else:
        order = [int(v) for v in initial_order]

    start = time.perf_counter()
    bs = BlanketScorer(source, method=config.method,
                       score_kind=config.score_kind, caching=config.caching)
    scorer = Scorer(bs, order)
    tol = bs.tol
    move_count = 0

    def sweep() -> int:
        # Passes repeat while the total strictly improves; the last pass may
        # still relocate variables sideways between tying positions.
        count = 0
        while True:
            before = scorer.total()
            for v in range(n):
                if best_move(scorer, v, left_only=config.left_only):
                    count += 1
            if not scorer.total() < before - tol:
                return count

    # Equal-score orders already expanded on the current plateau.
    visited: set = set()
    escape_rng = np.random.default_rng([config.seed, 1])
    best_score = None
    for _ in range(config.max_outer_iterations):
        move_count += sweep()
        if not config.use_two_step:
            break
        total = scorer.total()
        if best_score is None or total < best_score - tol:
            best_score = total
            visited = set()
        visited.add(tuple(scorer.order))
        if two_step(scorer, visited, collect=[]):
            move_count += 1
            continue
        escaped = _escape_plateau(scorer, visited, config.escape_budget,
                                  escape_rng, left_only=config.left_only)
        if escaped is None:
            break
        scorer = escaped
        move_count += 1
    dag = scorer.build_dag()
    return SearchResult(
        final_order=tuple(source.variables[v] for v in scorer.order),
        dag=dag,
        cpdag=dag_to_cpdag(dag),
        final_score=scorer.total(),
        move_count=move_count,
        elapsed=time.perf_counter() - start,
    )


def sp(source, score_kind: str = "edge", method: str = "growShrink",
       cap: int = SP_DEFAULT_CAP, caching: bool = True) -> SpResult:
    """Exhaustive minimum over all permutations; infeasible above the cap.

    Ties go to the lexicographically first permutation; all minimizing
    patterns are collected.
    """
    n = source.num_vars
    if n > cap:
        raise SourceError(
            f"exhaustive search over {n} variables exceeds the cap of {cap}"
        )
    start = time.perf_counter()
    bs = BlanketScorer(source, method=method, score_kind=score_kind,
                       caching=caching)
    tol = bs.tol
    best = None
    minimizing: list[tuple[int, ...]] = []
    for perm in itertools.permutations(range(n)):
        total = 0
        mask = 0
        for v in perm:
            total += bs.local_score_masked(v, mask)
            mask |= 1 << v
        if best is None or total < best - tol:
            best = total
            minimizing = [perm]
        elif abs(total - best) <= tol:
            minimizing.append(perm)

    def dag_for(perm):
        parents = [frozenset()] * n
        for pos, v in enumerate(perm):
            parents[v] = bs.blanket(v, frozenset(perm[:pos]))
        return Dag(tuple(source.variables), tuple(parents))

    best_perm = minimizing[0]
    best_dag = dag_for(best_perm)
    cpdags = frozenset(dag_to_cpdag(dag_for(p)) for p in minimizing)
    return SpResult(
        score=best,
        permutation=tuple(source.variables[v] for v in best_perm),
        dag=best_dag,
        cpdag=dag_to_cpdag(best_dag),
        minimizing_cpdags=cpdags,
        num_minimizing_permutations=len(minimizing),
        elapsed=time.perf_counter() - start,
    )
