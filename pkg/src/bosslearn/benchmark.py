"""Benchmark harness: seeded simulation studies producing averaged metric
tables, plus the oracle study and counterexample uniqueness reports."""

from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .fixtures import canonical_fixtures
from .graph import RandomGraphSpec, dag_to_cpdag, generate_dag
from .metrics import MetricsRecord, compare_cpdags, unique_cpdag_count
from .search import SearchConfig, boss, sp
from .sem import SimSpec, parameterize_sem, simulate_data
from .sources import DatasetBic, DsepOracle

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["BenchmarkSpec", "run_benchmark", "oracle_study",
           "counterexamples_report", "format_table", "rows_to_json"]


@dataclass(frozen=True)
class BenchmarkSpec:
    """One benchmark: rows are the cartesian product of the list-valued axes
    (average degree, sample size, penalty), each averaged over `runs` seeds."""

    num_nodes: int
    avg_degrees: tuple[float, ...] = (4.0,)
    sample_sizes: tuple[int, ...] = (1000,)
    penalties: tuple[float, ...] = (2.0,)
    coef_low: float = 0.2
    coef_high: float = 0.8
    var_low: float = 1.0
    var_high: float = 1.0
    generator: str = "erdosRenyiForward"
    alpha: float = 0.41
    beta: float = 0.54
    delta_in: float = 0.2
    delta_out: float = 0.1
    oracle: bool = False
    score_kind: str = "bic"
    use_two_step: bool = True
    left_only: bool = False
    caching: bool = True
    runs: int = 1
    seed_base: int = 0

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be at least 1")

    @classmethod
    def from_toml(cls, path) -> "BenchmarkSpec":
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "BenchmarkSpec":
        def as_tuple(value):
            return tuple(value) if isinstance(value, (list, tuple)) else (value,)

        known = {
            "nodes": "num_nodes",
            "avg_degree": "avg_degrees",
            "sample_size": "sample_sizes",
            "penalty": "penalties",
            "two_step": "use_two_step",
            "score": "score_kind",
        }
        kwargs = {}
        for key, value in raw.items():
            name = known.get(key, key)
            if name in ("avg_degrees", "sample_sizes", "penalties"):
                value = as_tuple(value)
            kwargs[name] = value
        return cls(**kwargs)


def _run_once(spec: BenchmarkSpec, degree, sample_size, penalty,
              row_index: int, run_index: int) -> MetricsRecord:
    rng = np.random.default_rng([spec.seed_base, row_index, run_index])
    graph_seed, sem_seed, data_seed = (int(s) for s in rng.integers(2**31, size=3))
    graph_spec = RandomGraphSpec(
        num_nodes=spec.num_nodes, avg_degree=degree, generator=spec.generator,
        alpha=spec.alpha, beta=spec.beta, delta_in=spec.delta_in,
        delta_out=spec.delta_out, seed=graph_seed,
    )
    truth = generate_dag(graph_spec)
    if spec.oracle:
        source = DsepOracle(truth)
        config = SearchConfig(score_kind="edge", use_two_step=spec.use_two_step,
                              left_only=spec.left_only, caching=spec.caching)
    else:
        sim = SimSpec(coef_low=spec.coef_low, coef_high=spec.coef_high,
                      var_low=spec.var_low, var_high=spec.var_high,
                      sample_size=sample_size, seed=sem_seed)
        sem = parameterize_sem(truth, sim)
        data = simulate_data(sem, sample_size, data_seed)
        source = DatasetBic(data, penalty_discount=penalty,
                            caching=spec.caching)
        config = SearchConfig(score_kind=spec.score_kind,
                              use_two_step=spec.use_two_step,
                              left_only=spec.left_only, caching=spec.caching)
    result = boss(source, config, initial_order="shuffle")
    return compare_cpdags(result.cpdag, dag_to_cpdag(truth),
                          elapsed=result.elapsed)


def _run_row(spec: BenchmarkSpec, combo, row_index: int) -> dict:
    degree, sample_size, penalty = combo
    records = []
    failures = []
    for run_index in range(spec.runs):
        try:
            records.append(_run_once(spec, degree, sample_size, penalty,
                                     row_index, run_index))
        except Exception as exc:
            failures.append(f"run {run_index}: {exc}")
    row = {
        "avgDegree": degree,
        "sampleSize": sample_size,
        "penaltyDiscount": penalty,
    }
    row.update(_average(records))
    row["failures"] = failures
    return row


def run_benchmark(spec: BenchmarkSpec, threads: int = 1) -> list[dict]:
    """One averaged row per (degree, sample size, penalty) combination.

    A failed run is recorded in the row's `failures` list rather than
    silently dropped; averages cover the successful runs. Rows own their RNG
    streams, so parallel execution does not change the output.
    """
    combos = [(d, n, c)
              for d in spec.avg_degrees
              for n in spec.sample_sizes
              for c in spec.penalties]
    if threads > 1 and len(combos) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_run_row, [spec] * len(combos), combos,
                                 range(len(combos))))
    return [_run_row(spec, combo, i) for i, combo in enumerate(combos)]


def _average(records: list[MetricsRecord]) -> dict:
    if not records:
        return {k: float("nan")
                for k in ("ap", "ar", "ahp", "ahr", "atpr", "afpr", "shd",
                          "elapsed")}
    dicts = [r.as_dict() for r in records]
    return {k: sum(d[k] for d in dicts) / len(dicts) for k in dicts[0]}


def oracle_study(num_nodes: int = 10, degrees=range(1, 10),
                 seeds_per_degree: int = 10, seed_base: int = 0,
                 use_two_step: bool = True) -> list[dict]:
    """d-separation-oracle accuracy study over a sweep of average degrees."""
    spec = BenchmarkSpec(num_nodes=num_nodes,
                         avg_degrees=tuple(float(d) for d in degrees),
                         oracle=True, score_kind="edge",
                         use_two_step=use_two_step,
                         runs=seeds_per_degree, seed_base=seed_base)
    return run_benchmark(spec)


def counterexamples_report(restarts: int = 500, seed_base: int = 0,
                           only: int | None = None) -> list[dict]:
    """Per counterexample fixture: the number of distinct patterns over
    seeded restarts of the relocation search, the exhaustive search's count
    of minimizing patterns, and whether the two sets agree."""
    fixtures = canonical_fixtures()
    report = []
    ks = [only] if only is not None else range(1, 7)
    for k in ks:
        fixture = fixtures[f"counterexample{k}"]
        source = fixture.fact_oracle()
        config = SearchConfig(score_kind="edge", use_two_step=True)
        t0 = time.perf_counter()
        boss_count, boss_cpdags = unique_cpdag_count(
            source, restarts=restarts, seed_base=seed_base, config=config)
        sp_count, sp_cpdags = unique_cpdag_count(
            source, restarts=restarts, seed_base=seed_base, config=config,
            algorithm="sp")
        sp_result = sp(source)
        report.append({
            "fixture": k,
            "boss_count": boss_count,
            "sp_count": sp_count,
            "identical": boss_cpdags == sp_cpdags,
            "sp_minimizing": len(sp_result.minimizing_cpdags),
            "elapsed": time.perf_counter() - t0,
        })
    return report


_TABLE_COLUMNS = [
    ("avgDegree", "{:>10.2f}"),
    ("sampleSize", "{:>11.2f}"),
    ("penaltyDiscount", "{:>16.2f}"),
    ("ap", "{:>6.2f}"),
    ("ar", "{:>6.2f}"),
    ("ahp", "{:>6.2f}"),
    ("ahr", "{:>6.2f}"),
    ("shd", "{:>7}"),
    ("elapsed", "{:>7.2f}"),
]
_HEADER_NAMES = {"ap": "AP", "ar": "AR", "ahp": "AHP", "ahr": "AHR",
                 "shd": "SHD", "elapsed": "E"}


def format_table(rows: list[dict], skip_constant: bool = True) -> str:
    """Fixed-width table with the benchmark column layout; axis columns that
    never vary are dropped."""
    if not rows:
        return ""
    columns = []
    for key, fmt in _TABLE_COLUMNS:
        if key not in rows[0]:
            continue
        values = {row.get(key) for row in rows}
        if skip_constant and key in ("avgDegree", "sampleSize",
                                     "penaltyDiscount") and len(values) == 1:
            continue
        columns.append((key, fmt))
    header = "".join(
        "{:>{w}}".format(_HEADER_NAMES.get(key, key),
                         w=len(fmt.format(0) if "f" in fmt else fmt.format(0)))
        for key, fmt in columns
    )
    lines = [header]
    for row in rows:
        cells = []
        for key, fmt in columns:
            value = row[key]
            if key == "shd":
                cells.append("{:>7}".format("-" if value == 0 else
                                            f"{value:.2f}"))
            else:
                cells.append(fmt.format(value))
        lines.append("".join(cells))
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[dict]) -> str:
    """One JSON object per row with the metric keys."""
    out = []
    for row in rows:
        entry = {k: row[k] for k in ("ap", "ar", "ahp", "ahr", "atpr", "afpr",
                                     "shd", "elapsed") if k in row}
        for key in ("avgDegree", "sampleSize", "penaltyDiscount", "failures"):
            if key in row:
                entry[key] = row[key]
        out.append(entry)
    return json.dumps(out, indent=2)
