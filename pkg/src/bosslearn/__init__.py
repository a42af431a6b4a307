"""Permutation-based causal structure learning with simulation, oracle, and
evaluation tooling."""

from .graph import (Cpdag, Dag, GraphError, GraphParseError, RandomGraphSpec,
                    d_separated, dag_to_cpdag, format_graph_text, generate_dag,
                    parse_graph_text)
from .sem import (Dataset, LinearSem, SemError, SimSpec, parameterize_sem,
                  population_covariance, simulate_data)
from .fixtures import Fixture, canonical_fixtures
from .sources import (DatasetBic, DsepOracle, FactOracle, FisherZ,
                      PopulationBic, PopulationPartialCorr, SingularityError,
                      SourceError, format_facts, parse_facts)
from .scorer import BlanketScorer, Scorer, grow_shrink_mb, verma_pearl_parents
from .search import SearchConfig, SearchResult, SpResult, best_move, boss, sp
from .metrics import MetricsRecord, compare_cpdags, unique_cpdag_count
from .benchmark import (BenchmarkSpec, counterexamples_report, format_table,
                        oracle_study, run_benchmark)

__version__ = "0.1.0"
