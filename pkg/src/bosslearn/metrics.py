"""Pattern comparison metrics and restart-uniqueness counting."""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .graph import Cpdag
from .search import SearchConfig, boss

__all__ = ["MetricsError", "MetricsRecord", "compare_cpdags", "unique_cpdag_count"]


class MetricsError(Exception):
    pass


@dataclass(frozen=True)
class MetricsRecord:
    """Adjacency/arrowhead precision and recall, rates, SHD, and timing for
    one estimated-vs-true pattern comparison."""

    ap: float
    ar: float
    ahp: float
    ahr: float
    atpr: float
    afpr: float
    shd: int
    elapsed_seconds: float = 0.0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["elapsed"] = d.pop("elapsed_seconds")
        return d


def _pair_mark(cpdag: Cpdag, a: int, b: int) -> str:
    if (a, b) in cpdag.directed:
        return "->"
    if (b, a) in cpdag.directed:
        return "<-"
    if (min(a, b), max(a, b)) in cpdag.undirected:
        return "--"
    return ""


def compare_cpdags(estimated: Cpdag, truth: Cpdag,
                   elapsed: float = 0.0) -> MetricsRecord:
    """Skeleton precision/recall, arrowhead precision/recall, adjacency
    true/false positive rates, and pair-level structural Hamming distance.

    Undefined 0/0 ratios report 1 for precisions and 0 for recall-like rates.
    An estimated arrowhead counts as a true positive only if the truth has the
    same directed edge; arrowheads on spurious adjacencies count as false
    positives.
    """
    if estimated.nodes != truth.nodes:
        raise MetricsError("patterns compare only over identical node lists")
    n = len(truth.nodes)

    est_skel = estimated.skeleton()
    true_skel = truth.skeleton()
    tp = len(est_skel & true_skel)
    fp = len(est_skel - true_skel)
    fn = len(true_skel - est_skel)
    ap = tp / (tp + fp) if (tp + fp) else 1.0
    ar = tp / (tp + fn) if (tp + fn) else 0.0

    ah_tp = len(estimated.directed & truth.directed)
    ahp = ah_tp / len(estimated.directed) if estimated.directed else 1.0
    ahr = ah_tp / len(truth.directed) if truth.directed else 0.0

    non_adjacent = n * (n - 1) // 2 - len(true_skel)
    afpr = fp / non_adjacent if non_adjacent else 0.0

    shd = 0
    for a in range(n):
        for b in range(a + 1, n):
            if _pair_mark(estimated, a, b) != _pair_mark(truth, a, b):
                shd += 1

    return MetricsRecord(ap=ap, ar=ar, ahp=ahp, ahr=ahr, atpr=ar, afpr=afpr,
                         shd=shd, elapsed_seconds=elapsed)


def unique_cpdag_count(source, restarts: int, seed_base: int = 0,
                       config: SearchConfig = SearchConfig(),
                       algorithm: str = "boss"):
    """Run the algorithm `restarts` times and collect the distinct patterns
    found. Returns (count, set of patterns).

    The relocation search restarts from seeded random initial orders. The
    exhaustive search has no initial order and breaks ties the same way every
    run, so its repeated runs collapse to a single evaluation.
    """
    if restarts < 1:
        raise MetricsError("restarts must be at least 1")
    if algorithm == "sp":
        from .search import sp

        result = sp(source, score_kind=config.score_kind,
                    method=config.method, caching=config.caching)
        return 1, {result.cpdag}
    if algorithm != "boss":
        raise MetricsError(f"unknown algorithm {algorithm!r}")
    n = source.num_vars
    cpdags = set()
    for r in range(restarts):
        rng = np.random.default_rng([seed_base, r])
        order = list(rng.permutation(n))
        result = boss(source, config, initial_order=order)
        cpdags.add(result.cpdag)
    return len(cpdags), cpdags
