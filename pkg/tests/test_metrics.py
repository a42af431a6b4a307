"""Pattern comparison metrics and restart-uniqueness counting."""

import numpy as np
import pytest

from bosslearn.fixtures import canonical_fixtures, worked_example_dag
from bosslearn.graph import Cpdag, Dag, dag_to_cpdag
from bosslearn.metrics import MetricsError, compare_cpdags, unique_cpdag_count
from bosslearn.search import SearchConfig
from bosslearn.sources import DsepOracle

from conftest import random_dag


def _true_cpdag():
    return dag_to_cpdag(worked_example_dag())


def test_identical_patterns_all_perfect():
    rec = compare_cpdags(_true_cpdag(), _true_cpdag())
    assert (rec.ap, rec.ar, rec.ahp, rec.ahr) == (1.0, 1.0, 1.0, 1.0)
    assert rec.shd == 0
    assert rec.afpr == 0.0


def test_empty_estimate_recall_zero():
    empty = Cpdag(_true_cpdag().nodes, frozenset(), frozenset())
    rec = compare_cpdags(empty, _true_cpdag())
    assert rec.ar == 0.0
    assert rec.ap == 1.0  # no predictions, 0/0 convention
    assert rec.shd == 4


def test_wrongly_directed_edge_counts():
    """Same skeleton, X1-X2 directed the wrong way: ap=ar=1, shd=1,
    arrowhead precision 2/3."""
    truth = _true_cpdag()
    est = Cpdag(truth.nodes,
                frozenset({(1, 0), (1, 3), (2, 3)}),
                frozenset({(0, 2)}))
    rec = compare_cpdags(est, truth)
    assert rec.ap == 1.0 and rec.ar == 1.0
    assert rec.shd == 1
    assert abs(rec.ahp - 2.0 / 3.0) < 1e-12
    assert rec.ahr == 1.0


def test_node_set_mismatch():
    other = Cpdag(("A", "B"), frozenset(), frozenset())
    with pytest.raises(MetricsError):
        compare_cpdags(other, _true_cpdag())


def test_swap_exchanges_precision_and_recall():
    rng = np.random.default_rng(67)
    for _ in range(30):
        a = dag_to_cpdag(random_dag(rng, 5))
        b = dag_to_cpdag(random_dag(rng, 5))
        fwd = compare_cpdags(a, b)
        rev = compare_cpdags(b, a)
        skel_a, skel_b = a.skeleton(), b.skeleton()
        if skel_a and skel_b:
            assert fwd.ap == rev.ar and fwd.ar == rev.ap
        assert fwd.shd == rev.shd


def test_shd_zero_iff_identical():
    rng = np.random.default_rng(71)
    for _ in range(40):
        a = dag_to_cpdag(random_dag(rng, 5))
        b = dag_to_cpdag(random_dag(rng, 5))
        assert (compare_cpdags(a, b).shd == 0) == (a == b)


def test_dag_vs_own_pattern_perfect():
    rng = np.random.default_rng(73)
    for _ in range(10):
        cp = dag_to_cpdag(random_dag(rng, 6))
        rec = compare_cpdags(cp, cp)
        assert (rec.ap, rec.ar, rec.ahp, rec.shd) == (1, 1, 1, 0)
        # A pattern with no compelled arrow has undefined arrowhead recall,
        # which the 0/0 convention reports as 0 rather than 1.
        assert rec.ahr == (1.0 if cp.directed else 0.0)


def test_atpr_equals_ar_and_afpr_counts_extras():
    truth = _true_cpdag()
    est = Cpdag(truth.nodes, frozenset(), frozenset({(0, 1), (0, 3)}))
    rec = compare_cpdags(est, truth)
    assert rec.atpr == rec.ar
    # One spurious adjacency out of two true non-adjacent pairs.
    assert abs(rec.afpr - 0.5) < 1e-12


def test_unique_count_single_restart():
    src = DsepOracle(worked_example_dag())
    count, cpdags = unique_cpdag_count(src, restarts=1,
                                       config=SearchConfig(score_kind="edge"))
    assert count == 1 and len(cpdags) == 1


def test_unique_count_monotone_in_restarts():
    src = canonical_fixtures()["counterexample1"].fact_oracle()
    cfg = SearchConfig(score_kind="edge")
    counts = [unique_cpdag_count(src, restarts=r, config=cfg)[0]
              for r in (1, 5, 25, 100)]
    assert counts == sorted(counts)


def test_unique_count_sp_collapses_to_one():
    src = canonical_fixtures()["counterexample3"].fact_oracle()
    cfg = SearchConfig(score_kind="edge")
    count, cpdags = unique_cpdag_count(src, restarts=50, config=cfg,
                                       algorithm="sp")
    assert count == 1 and len(cpdags) == 1


def test_unique_count_validation():
    src = DsepOracle(worked_example_dag())
    with pytest.raises(MetricsError):
        unique_cpdag_count(src, restarts=0)
    with pytest.raises(MetricsError):
        unique_cpdag_count(src, restarts=1, algorithm="ges")
