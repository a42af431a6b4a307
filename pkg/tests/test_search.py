"""Relocation search, triangle-swap escape, and the exhaustive oracle."""

import numpy as np
import pytest

from bosslearn.fixtures import canonical_fixtures, worked_example_dag
from bosslearn.graph import dag_to_cpdag
from bosslearn.scorer import BlanketScorer, Scorer
from bosslearn.search import (SP_DEFAULT_CAP, SearchConfig, best_move, boss,
                              sp, two_step)
from bosslearn.sources import DsepOracle, FactOracle, SourceError

from conftest import random_dag


def _we_oracle():
    return DsepOracle(worked_example_dag())


def _we_scorer(order_names):
    src = _we_oracle()
    bs = BlanketScorer(src, score_kind="edge")
    idx = {name: i for i, name in enumerate(src.variables)}
    return Scorer(bs, [idx[name] for name in order_names])


def test_best_move_stuck_variable():
    # From [X4, X2, X3, X1], no position for X1 lowers the score of 5.
    scorer = _we_scorer(["X4", "X2", "X3", "X1"])
    assert not best_move(scorer, 0)
    assert scorer.total() == 5


def test_best_move_single_step_to_minimum():
    # Both score-4 targets tie; the right-most minimizing position wins,
    # so X1 lands second, not first.
    scorer = _we_scorer(["X2", "X3", "X4", "X1"])
    assert best_move(scorer, 0)
    assert scorer.order == [1, 0, 2, 3]
    assert scorer.total() == 4


def test_best_move_single_variable_problem():
    src = FactOracle(("A",), [])
    scorer = Scorer(BlanketScorer(src, score_kind="edge"), [0])
    assert not best_move(scorer, 0)


def test_best_move_never_increases_score():
    rng = np.random.default_rng(41)
    for _ in range(50):
        n = int(rng.integers(2, 8))
        g = random_dag(rng, n)
        scorer = Scorer(BlanketScorer(DsepOracle(g), score_kind="edge"),
                        list(rng.permutation(n)))
        before = scorer.total()
        best_move(scorer, int(rng.integers(n)))
        assert scorer.total() <= before


def test_best_move_left_only_never_moves_right():
    rng = np.random.default_rng(43)
    for _ in range(30):
        n = int(rng.integers(2, 8))
        g = random_dag(rng, n)
        scorer = Scorer(BlanketScorer(DsepOracle(g), score_kind="edge"),
                        list(rng.permutation(n)))
        v = int(rng.integers(n))
        pos = scorer.position(v)
        best_move(scorer, v, left_only=True)
        assert scorer.position(v) <= pos


def test_two_step_escapes_start_plateau():
    """The triangle swap from [X4,X2,X3,X1] reaches a score-5 order whose
    built DAG orients the 2 -> 4 <- 3 collider, after which one relocation
    of X1 reaches the minimum."""
    scorer = _we_scorer(["X4", "X2", "X3", "X1"])
    assert two_step(scorer, visited={tuple(scorer.order)})
    assert scorer.total() == 5
    assert best_move(scorer, 0)
    assert scorer.total() == 4


def test_two_step_triangle_free_no_change():
    # Chain A -> B -> C in causal order builds a triangle-free DAG.
    g = random_dag(np.random.default_rng(0), 3, 0.0)
    scorer = Scorer(BlanketScorer(DsepOracle(g), score_kind="edge"), [0, 1, 2])
    assert not two_step(scorer, visited=set())


def test_two_step_no_accepting_swap_at_minimum():
    scorer = _we_scorer(["X1", "X2", "X3", "X4"])
    visited = {tuple(scorer.order)}
    # Strict-only form: equal-score neighbors are collected, not taken.
    assert not two_step(scorer, visited, collect=[])
    assert scorer.total() == 4


def test_boss_from_truth_order():
    result = boss(_we_oracle(), SearchConfig(score_kind="edge"),
                  initial_order=[0, 1, 2, 3])
    assert result.final_score == 4
    assert result.cpdag == dag_to_cpdag(worked_example_dag())


def test_boss_start_with_two_step_reaches_truth():
    result = boss(_we_oracle(), SearchConfig(score_kind="edge"),
                  initial_order=[3, 1, 2, 0])
    assert result.final_score == 4
    assert result.cpdag == dag_to_cpdag(worked_example_dag())


def test_boss_start_without_two_step_is_stuck_at_five():
    result = boss(_we_oracle(),
                  SearchConfig(score_kind="edge", use_two_step=False),
                  initial_order=[3, 1, 2, 0])
    assert result.final_score == 5


def test_boss_two_step_never_hurts():
    rng = np.random.default_rng(47)
    for seed in range(20):
        n = int(rng.integers(3, 8))
        g = random_dag(rng, n)
        src = DsepOracle(g)
        start = list(rng.permutation(n))
        with_ts = boss(src, SearchConfig(score_kind="edge", seed=seed),
                       initial_order=start)
        without = boss(src, SearchConfig(score_kind="edge", seed=seed,
                                         use_two_step=False),
                       initial_order=start)
        assert with_ts.final_score <= without.final_score


def test_boss_score_never_exceeds_initial():
    rng = np.random.default_rng(53)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        g = random_dag(rng, n)
        src = DsepOracle(g)
        order = list(rng.permutation(n))
        initial = Scorer(BlanketScorer(src, score_kind="edge"), order).total()
        result = boss(src, SearchConfig(score_kind="edge"), initial_order=order)
        assert result.final_score <= initial


def test_boss_result_consistency():
    result = boss(_we_oracle(), SearchConfig(score_kind="edge"),
                  initial_order=[3, 1, 2, 0])
    assert result.dag.num_edges == result.final_score
    assert dag_to_cpdag(result.dag) == result.cpdag
    assert sorted(result.final_order) == sorted(_we_oracle().variables)


def test_boss_shuffle_start_deterministic_per_seed():
    g = random_dag(np.random.default_rng(59), 7)
    src = DsepOracle(g)
    a = boss(src, SearchConfig(score_kind="edge", seed=4), initial_order="shuffle")
    b = boss(src, SearchConfig(score_kind="edge", seed=4), initial_order="shuffle")
    assert a.final_order == b.final_order
    assert a.final_score == b.final_score


def test_boss_rejects_bad_inputs():
    with pytest.raises(SourceError):
        boss(_we_oracle(), SearchConfig(), initial_order="sideways")
    with pytest.raises(SourceError):
        SearchConfig(max_outer_iterations=0)


def test_sp_worked_example():
    result = sp(_we_oracle())
    assert result.score == 4
    # Lexicographically first minimizing permutation is the true order.
    assert result.permutation == ("X1", "X2", "X3", "X4")
    assert result.num_minimizing_permutations == 4
    assert result.minimizing_cpdags == frozenset(
        {dag_to_cpdag(worked_example_dag())}
    )


def test_sp_single_variable():
    result = sp(FactOracle(("A",), []))
    assert result.score == 0
    assert result.dag.num_edges == 0


def test_sp_counterexample2_unique_pattern():
    src = canonical_fixtures()["counterexample2"].fact_oracle()
    result = sp(src)
    assert len(result.minimizing_cpdags) == 1


def test_sp_cap_enforced():
    names = tuple(str(i) for i in range(SP_DEFAULT_CAP + 1))
    with pytest.raises(SourceError):
        sp(FactOracle(names, []))


def test_boss_matches_sp_on_small_random_problems():
    rng = np.random.default_rng(61)
    for _ in range(25):
        n = int(rng.integers(3, 7))
        g = random_dag(rng, n)
        src = DsepOracle(g)
        b = boss(src, SearchConfig(score_kind="edge"),
                 initial_order=list(rng.permutation(n)))
        s = sp(src)
        assert b.final_score == s.score
        assert b.cpdag in s.minimizing_cpdags
