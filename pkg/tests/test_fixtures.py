"""Canonical fixtures: worked example, path cancellation, counterexamples."""

import numpy as np
import pytest

from bosslearn.fixtures import canonical_fixtures, path_cancel_sem, \
    worked_example_dag
from bosslearn.sem import population_covariance


def test_worked_example_shape():
    g = worked_example_dag()
    assert g.nodes == ("X1", "X2", "X3", "X4")
    assert g.num_edges == 4


def test_fixture_names():
    fixtures = canonical_fixtures()
    expected = {"workedExample", "pathCancel"} | \
        {f"counterexample{k}" for k in range(1, 7)}
    assert set(fixtures) == expected


def test_path_cancel_fixture_is_standardized():
    sem = canonical_fixtures()["pathCancel"].sem
    cov = population_covariance(sem)
    assert np.allclose(np.diag(cov), 1.0, atol=1e-12)
    assert abs(cov[0, 3]) < 1e-12


def test_path_cancel_coefficient_values():
    sem = path_cancel_sem()
    coefs = dict(sem.coefficients)
    assert coefs[(0, 3)] == -0.125
    assert coefs[(0, 1)] == coefs[(1, 2)] == coefs[(2, 3)] == 0.5


def test_counterexample3_fact_list_contents():
    fx = canonical_fixtures()["counterexample3"]
    assert ("1", "5", ("2", "3")) in fx.facts
    assert len(fx.variables) == 5


def test_counterexample_fact_oracles_are_queryable():
    fixtures = canonical_fixtures()
    for k in range(1, 7):
        src = fixtures[f"counterexample{k}"].fact_oracle()
        assert src.num_vars >= 4
        assert isinstance(src.independent(0, 1, frozenset()), bool)


def test_fixture_without_facts_refuses_oracle():
    with pytest.raises(ValueError):
        canonical_fixtures()["workedExample"].fact_oracle()


def test_counterexample1_true_dag_attached():
    fx = canonical_fixtures()["counterexample1"]
    assert fx.dag is not None
    assert fx.dag.num_edges == 4
