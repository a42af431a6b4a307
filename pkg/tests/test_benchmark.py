"""Benchmark harness: spec parsing, determinism, tables, studies."""

import json

import pytest

from bosslearn.benchmark import (BenchmarkSpec, counterexamples_report,
                                 format_table, oracle_study, run_benchmark,
                                 rows_to_json)


def test_spec_from_dict_aliases():
    spec = BenchmarkSpec.from_dict({
        "nodes": 10, "avg_degree": [2, 4], "sample_size": 500,
        "penalty": 2.0, "two_step": False, "score": "bic", "runs": 3,
    })
    assert spec.num_nodes == 10
    assert spec.avg_degrees == (2, 4)
    assert spec.sample_sizes == (500,)
    assert spec.use_two_step is False
    assert spec.runs == 3


def test_spec_from_toml(tmp_path):
    path = tmp_path / "bench.toml"
    path.write_text('nodes = 6\navg_degree = [1.0, 2.0]\nruns = 2\n'
                    'sample_size = 200\n')
    spec = BenchmarkSpec.from_toml(path)
    assert spec.num_nodes == 6
    assert spec.avg_degrees == (1.0, 2.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        BenchmarkSpec(num_nodes=5, runs=0)


def test_run_benchmark_row_shape():
    spec = BenchmarkSpec(num_nodes=6, avg_degrees=(2.0,), sample_sizes=(300,),
                         runs=2, seed_base=5)
    rows = run_benchmark(spec)
    assert len(rows) == 1
    row = rows[0]
    for key in ("ap", "ar", "ahp", "ahr", "atpr", "afpr", "shd", "elapsed"):
        assert key in row
    assert row["failures"] == []


def _strip_timing(rows):
    return [{k: v for k, v in row.items() if k != "elapsed"} for row in rows]


def test_run_benchmark_deterministic():
    spec = BenchmarkSpec(num_nodes=5, avg_degrees=(2.0,), sample_sizes=(200,),
                         runs=2, seed_base=9)
    a = run_benchmark(spec)
    b = run_benchmark(spec)
    assert _strip_timing(a) == _strip_timing(b)


def test_run_benchmark_cartesian_product():
    spec = BenchmarkSpec(num_nodes=5, avg_degrees=(1.0, 2.0),
                         sample_sizes=(100, 200), penalties=(2.0,),
                         runs=1, seed_base=0)
    rows = run_benchmark(spec)
    assert len(rows) == 4
    combos = {(r["avgDegree"], r["sampleSize"]) for r in rows}
    assert combos == {(1.0, 100), (1.0, 200), (2.0, 100), (2.0, 200)}


def test_run_benchmark_threads_match_serial():
    spec = BenchmarkSpec(num_nodes=5, avg_degrees=(1.0, 2.0),
                         sample_sizes=(100,), runs=1, seed_base=3)
    assert _strip_timing(run_benchmark(spec, threads=2)) == \
        _strip_timing(run_benchmark(spec, threads=1))


def test_oracle_study_small_sweep_perfect():
    rows = oracle_study(num_nodes=6, degrees=(1, 2, 3), seeds_per_degree=3)
    assert len(rows) == 3
    for row in rows:
        assert row["ap"] == 1.0 and row["ar"] == 1.0
        assert row["shd"] == 0


def test_counterexamples_report_single_fixture():
    report = counterexamples_report(restarts=25, seed_base=0, only=2)
    assert len(report) == 1
    entry = report[0]
    assert entry["fixture"] == 2
    assert entry["boss_count"] == 1
    assert entry["sp_count"] == 1
    assert entry["identical"]


def test_format_table_layout():
    rows = [{"avgDegree": 2.0, "sampleSize": 100, "penaltyDiscount": 2.0,
             "ap": 1.0, "ar": 0.5, "ahp": 1.0, "ahr": 0.25, "shd": 3.0,
             "elapsed": 0.01},
            {"avgDegree": 4.0, "sampleSize": 100, "penaltyDiscount": 2.0,
             "ap": 1.0, "ar": 1.0, "ahp": 1.0, "ahr": 1.0, "shd": 0,
             "elapsed": 0.01}]
    text = format_table(rows)
    lines = text.strip().split("\n")
    assert len(lines) == 3
    assert "AP" in lines[0] and "SHD" in lines[0]
    # Constant axes are dropped, varying ones kept; zero SHD prints a dash.
    assert "sampleSize" not in lines[0]
    assert lines[2].strip().endswith("0.01")
    assert " - " in lines[2] or lines[2].split()[-2] == "-"


def test_rows_to_json_round_trips():
    spec = BenchmarkSpec(num_nodes=5, avg_degrees=(2.0,), sample_sizes=(100,),
                         runs=1, seed_base=1)
    rows = run_benchmark(spec)
    parsed = json.loads(rows_to_json(rows))
    assert len(parsed) == 1
    assert parsed[0]["avgDegree"] == 2.0
    assert "ap" in parsed[0]
