"""Canonical small fixtures: the 4-node worked example, the path-canceling
SEM, and the six unfaithful CI-fact counterexamples."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Dag
from .sem import LinearSem, standardized_error_variances
from .sources import FactOracle

__all__ = ["Fixture", "canonical_fixtures", "worked_example_dag", "path_cancel_sem"]


@dataclass(frozen=True)
class Fixture:
    """A named fixture: variables plus an optional fact list, DAG, and SEM."""

    name: str
    variables: tuple[str, ...]
    facts: tuple | None = None
    dag: Dag | None = None
    sem: LinearSem | None = None

    def fact_oracle(self) -> FactOracle:
        if self.facts is None:
            raise ValueError(f"fixture {self.name!r} has no fact list")
        return FactOracle(self.variables, self.facts)


def worked_example_dag() -> Dag:
    """Four nodes, four edges: X1 -> X2, X1 -> X3, X2 -> X4, X3 -> X4."""
    return Dag.from_edges(
        ["X1", "X2", "X3", "X4"],
        [("X1", "X2"), ("X1", "X3"), ("X2", "X4"), ("X3", "X4")],
    )


def path_cancel_dag() -> Dag:
    return Dag.from_edges(
        ["1", "2", "3", "4"],
        [("1", "2"), ("2", "3"), ("3", "4"), ("1", "4")],
    )


def path_cancel_sem() -> LinearSem:
    """Standardized SEM where the direct 1->4 effect cancels the chain through
    2 and 3, making 1 and 4 marginally independent."""
    dag = path_cancel_dag()
    coef_map = {
        (dag.index("1"), dag.index("2")): 0.5,
        (dag.index("2"), dag.index("3")): 0.5,
        (dag.index("3"), dag.index("4")): 0.5,
        (dag.index("1"), dag.index("4")): -0.125,
    }
    variances = standardized_error_variances(dag, coef_map)
    return LinearSem.from_maps(dag, coef_map, variances)


_COUNTEREXAMPLE_FACTS = {
    # 4-node path canceling model.
    1: (4, [("1", "3", ("2",)),
            ("2", "4", ("1", "3")),
            ("1", "4", ())]),
    # SMR without restricted faithfulness.
    2: (4, [("1", "3", ("2",)),
            ("2", "4", ("1", "3")),
            ("1", "2", ("4",))]),
    # 5-node fixture where the grow-shrink and all-prefix parent builders
    # disagree on edge count.
    3: (5, [("1", "5", ("2", "3")),
            ("2", "4", ("1", "3")),
            ("3", "5", ("1", "2", "4")),
            ("1", "4", ("2", "3", "5")),
            ("1", "4", ("2", "3"))]),
    4: (4, [("1", "2", ("4",)),
            ("1", "3", ("2",)),
            ("2", "4", ("1", "3"))]),
    5: (5, [("1", "3", ("2",)),
            ("2", "4", ("1", "3")),
            ("4", "5", ())]),
    6: (6, [("1", "3", ()),
            ("1", "5", ("2", "3", "4")),
            ("4", "6", ("1", "2", "3", "5")),
            ("1", "3", ("2", "4", "5", "6"))]),
}


def canonical_fixtures() -> dict[str, Fixture]:
    """Fixtures addressable by name: 'workedExample', 'pathCancel', and
    'counterexample1' through 'counterexample6'."""
    fixtures = {}
    we = worked_example_dag()
    fixtures["workedExample"] = Fixture("workedExample", we.nodes, dag=we)
    sem = path_cancel_sem()
    fixtures["pathCancel"] = Fixture(
        "pathCancel", sem.dag.nodes, dag=sem.dag, sem=sem
    )
    for k, (nvars, facts) in _COUNTEREXAMPLE_FACTS.items():
        name = f"counterexample{k}"
        variables = tuple(str(i + 1) for i in range(nvars))
        dag = path_cancel_dag() if k == 1 else None
        fixtures[name] = Fixture(name, variables, facts=tuple(facts), dag=dag)
    return fixtures
