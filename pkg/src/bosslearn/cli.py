"""Command-line interface: simulation, search, fixtures, and benchmarks.

Exit codes: 0 success, 2 usage error, 1 runtime error (one-line diagnostic
on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .benchmark import (BenchmarkSpec, counterexamples_report, format_table,
                        oracle_study, run_benchmark, rows_to_json)
from .fixtures import canonical_fixtures
from .graph import (GraphError, RandomGraphSpec, dag_to_cpdag,
                    format_graph_text, generate_dag)
from .metrics import MetricsError
from .search import SearchConfig, boss, sp
from .sem import Dataset, SemError, SimSpec, parameterize_sem, simulate_data
from .sources import (DatasetBic, FactOracle, PopulationBic, SourceError,
                      parse_facts)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class CliError(Exception):
    pass


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == "on"


def _parse_degrees(text: str) -> list[int]:
    if ".." in text:
        lo, _, hi = text.partition("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",")]


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]):
    """Load flat key=value defaults from a --config file; flags override."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            with open(known.config, "rb") as fh:
                raw = tomllib.load(fh)
        except FileNotFoundError:
            raise CliError(f"config file not found: {known.config}")
        except tomllib.TOMLDecodeError as exc:
            raise CliError(f"malformed config file {known.config}: {exc}")
        defaults = {k.replace("-", "_"): v for k, v in raw.items()}
        parser.set_defaults(**defaults)
        # Subparsers re-apply their own defaults after the main parser, so
        # the overrides must reach them as well.
        for action in parser._actions:
            if isinstance(action, argparse._SubParsersAction):
                for sub in action.choices.values():
                    sub.set_defaults(**{
                        k: v for k, v in defaults.items()
                        if any(a.dest == k for a in sub._actions)
                    })


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bosslearn",
        description="Permutation-based causal structure learning tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a random DAG and sample data")
    p.add_argument("--config")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--avg-degree", type=float, required=True)
    p.add_argument("--scale-free", action="store_true")
    p.add_argument("--alpha", type=float, default=0.41)
    p.add_argument("--beta", type=float, default=0.54)
    p.add_argument("--delta-in", type=float, default=0.2)
    p.add_argument("--delta-out", type=float, default=0.1)
    p.add_argument("--coef-low", type=float, default=0.2)
    p.add_argument("--coef-high", type=float, default=0.8)
    p.add_argument("--var-low", type=float, default=1.0)
    p.add_argument("--var-high", type=float, default=1.0)
    p.add_argument("-n", "--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-data", required=True)
    p.add_argument("--out-graph", required=True)

    p = sub.add_parser("search", help="run the relocation search on a dataset")
    p.add_argument("--config")
    p.add_argument("--data")
    p.add_argument("--cov", help="covariance CSV instead of raw data")
    p.add_argument("-n", "--pseudo-n", type=float, default=1e6,
                   help="pseudo sample size for a covariance input")
    p.add_argument("--score", choices=("bic", "edge"), default="bic")
    p.add_argument("--penalty", type=float, default=2.0)
    p.add_argument("--two-step", type=_on_off, default=True)
    p.add_argument("--left-only", type=_on_off, default=False)
    p.add_argument("--cache", type=_on_off, default=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--json")

    p = sub.add_parser("oracle-study",
                       help="d-separation oracle accuracy sweep")
    p.add_argument("--config")
    p.add_argument("--nodes", type=int, default=10)
    p.add_argument("--degrees", type=_parse_degrees, default=list(range(1, 10)))
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("counterexamples",
                       help="uniqueness counts on the unfaithful fixtures")
    p.add_argument("--config")
    p.add_argument("--restarts", type=int, default=500)
    p.add_argument("--fixture", type=int, choices=range(1, 7))
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sp", help="exhaustive sparsest-permutation search")
    p.add_argument("--config")
    p.add_argument("--facts")
    p.add_argument("--data")
    p.add_argument("--penalty", type=float, default=2.0)
    p.add_argument("--score", choices=("bic", "edge"), default="edge")
    p.add_argument("--method", choices=("growShrink", "vermaPearl"),
                   default="growShrink")

    p = sub.add_parser("benchmark", help="run a benchmark spec file")
    p.add_argument("--config")
    p.add_argument("--spec", required=True)
    p.add_argument("--out")
    p.add_argument("--threads", type=int, default=1)

    return parser


def _cmd_simulate(args) -> int:
    spec = RandomGraphSpec(
        num_nodes=args.nodes, avg_degree=args.avg_degree,
        generator="scaleFree" if args.scale_free else "erdosRenyiForward",
        alpha=args.alpha, beta=args.beta, delta_in=args.delta_in,
        delta_out=args.delta_out, seed=args.seed,
    )
    dag = generate_dag(spec)
    sim = SimSpec(coef_low=args.coef_low, coef_high=args.coef_high,
                  var_low=args.var_low, var_high=args.var_high,
                  sample_size=args.samples, seed=args.seed + 1)
    sem = parameterize_sem(dag, sim)
    data = simulate_data(sem, args.samples, args.seed + 2)
    with open(args.out_graph, "w", newline="\n") as fh:
        fh.write(format_graph_text(dag))
    data.to_csv(args.out_data)
    print(f"wrote {args.out_graph} ({dag.num_edges} edges) and "
          f"{args.out_data} ({data.num_rows} rows)")
    return 0


def _load_search_source(args):
    if args.data:
        dataset = Dataset.from_csv(args.data)
        return DatasetBic(dataset, penalty_discount=args.penalty,
                          caching=args.cache)
    if args.cov:
        table = Dataset.from_csv(args.cov)
        cov = table.values
        if cov.shape[0] != cov.shape[1]:
            raise CliError("covariance CSV must be square")
        return PopulationBic(table.variable_names, cov,
                             pseudo_sample_size=args.pseudo_n,
                             penalty_discount=args.penalty,
                             caching=args.cache)
    raise CliError("search needs --data or --cov")


def _cmd_search(args) -> int:
    source = _load_search_source(args)
    config = SearchConfig(score_kind=args.score, use_two_step=args.two_step,
                          left_only=args.left_only, caching=args.cache,
                          seed=args.seed)
    result = boss(source, config, initial_order="shuffle")
    text = format_graph_text(result.cpdag)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.json:
        payload = {
            "finalOrder": list(result.final_order),
            "finalScore": result.final_score,
            "moveCount": result.move_count,
            "elapsed": result.elapsed,
            "numEdges": result.cpdag.num_edges,
        }
        with open(args.json, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return 0


def _cmd_oracle_study(args) -> int:
    rows = oracle_study(num_nodes=args.nodes, degrees=args.degrees,
                        seeds_per_degree=args.runs, seed_base=args.seed)
    sys.stdout.write(format_table(rows))
    return 0


def _cmd_counterexamples(args) -> int:
    report = counterexamples_report(restarts=args.restarts,
                                    seed_base=args.seed, only=args.fixture)
    for entry in report:
        print(f"counterexample {entry['fixture']}: "
              f"BOSS = {entry['boss_count']}, SP = {entry['sp_count']}")
    if not all(e["identical"] for e in report):
        print("warning: search and exhaustive patterns differ", file=sys.stderr)
        return 1
    return 0


def _cmd_sp(args) -> int:
    if args.facts:
        try:
            with open(args.facts) as fh:
                facts = parse_facts(fh.read())
        except FileNotFoundError:
            raise CliError(f"facts file not found: {args.facts}")
        names = sorted({t for x, y, z in facts for t in (x, y, *z)},
                       key=lambda s: (len(s), s))
        source = FactOracle(names, facts)
        score = "edge"
    elif args.data:
        dataset = Dataset.from_csv(args.data)
        source = DatasetBic(dataset, penalty_discount=args.penalty)
        score = args.score
    else:
        raise CliError("sp needs --facts or --data")
    result = sp(source, score_kind=score, method=args.method)
    print(f"minimum score = {result.score} over "
          f"{result.num_minimizing_permutations} permutation(s); "
          f"{len(result.minimizing_cpdags)} distinct pattern(s)")
    sys.stdout.write(format_graph_text(result.cpdag))
    return 0


def _cmd_benchmark(args) -> int:
    spec = BenchmarkSpec.from_toml(args.spec)
    rows = run_benchmark(spec, threads=args.threads)
    sys.stdout.write(format_table(rows))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(rows_to_json(rows))
            fh.write("\n")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "search": _cmd_search,
    "oracle-study": _cmd_oracle_study,
    "counterexamples": _cmd_counterexamples,
    "sp": _cmd_sp,
    "benchmark": _cmd_benchmark,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (CliError, GraphError, SemError, SourceError, MetricsError,
            FileNotFoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
