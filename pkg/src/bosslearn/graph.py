"""Directed acyclic graphs, d-separation, patterns (CPDAGs), and random generation."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GraphError",
    "GraphParseError",
    "Dag",
    "Cpdag",
    "RandomGraphSpec",
    "d_separated",
    "dag_to_cpdag",
    "generate_dag",
    "parse_graph_text",
    "format_graph_text",
]


class GraphError(Exception):
    """Invalid graph structure or query."""


class GraphParseError(GraphError):
    """Malformed graph text; message names the offending line."""


def default_node_names(n: int) -> list[str]:
    return [f"X{i + 1}" for i in range(n)]


@dataclass(frozen=True)
class Dag:
    """A DAG as an ordered node list plus per-node parent index sets.

    Immutable after construction; acyclicity and parent-set validity are
    checked eagerly.
    """

    nodes: tuple[str, ...]
    parents: tuple[frozenset[int], ...]

    def __post_init__(self):
        n = len(self.nodes)
        if len(set(self.nodes)) != n:
            raise GraphError("duplicate node names")
        if len(self.parents) != n:
            raise GraphError("parent list length does not match node count")
        for v, ps in enumerate(self.parents):
            for p in ps:
                if not 0 <= p < n:
                    raise GraphError(f"invalid parent index {p} for node {self.nodes[v]}")
                if p == v:
                    raise GraphError(f"self-parent on node {self.nodes[v]}")
        if self.topological_order() is None:
            raise GraphError("graph contains a directed cycle")

    @classmethod
    def from_edges(cls, nodes: Sequence[str], edges: Iterable[tuple[str, str]]) -> "Dag":
        index = {name: i for i, name in enumerate(nodes)}
        parents = [set() for _ in nodes]
        for a, b in edges:
            if a not in index or b not in index:
                raise GraphError(f"unknown node in edge {a} --> {b}")
            parents[index[b]].add(index[a])
        return cls(tuple(nodes), tuple(frozenset(p) for p in parents))

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def index(self, name: str) -> int:
        try:
            return self.nodes.index(name)
        except ValueError:
            raise GraphError(f"unknown node name {name!r}") from None

    def edges(self) -> list[tuple[int, int]]:
        """All directed edges as (parent, child) index pairs, sorted."""
        return sorted((p, v) for v in range(self.num_nodes) for p in self.parents[v])

    @property
    def num_edges(self) -> int:
        return sum(len(ps) for ps in self.parents)

    def children(self, v: int) -> set[int]:
        return {w for w in range(self.num_nodes) if v in self.parents[w]}

    def adjacent(self, a: int, b: int) -> bool:
        return a in self.parents[b] or b in self.parents[a]

    def topological_order(self) -> list[int] | None:
        """Kahn's algorithm; None if a cycle exists."""
        n = len(self.nodes)
        indeg = [len(ps) for ps in self.parents]
        children = [[] for _ in range(n)]
        for v in range(n):
            for p in self.parents[v]:
                children[p].append(v)
        stack = [v for v in range(n) if indeg[v] == 0]
        order = []
        while stack:
            v = stack.pop()
            order.append(v)
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    stack.append(c)
        return order if len(order) == n else None

    def ancestors(self, vs: Iterable[int]) -> set[int]:
        """All strict ancestors of any node in vs."""
        seen = set()
        stack = list(vs)
        while stack:
            v = stack.pop()
            for p in self.parents[v]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    def descendants(self, v: int) -> set[int]:
        seen = set()
        stack = [v]
        while stack:
            w = stack.pop()
            for c in self.children(w):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return seen


@dataclass(frozen=True)
class Cpdag:
    """A pattern: directed edges plus undirected edges over a shared node list.

    Undirected edges are stored as (low, high) index pairs. The edge sets are
    disjoint on node pairs with at most one edge per pair.
    """

    nodes: tuple[str, ...]
    directed: frozenset[tuple[int, int]]
    undirected: frozenset[tuple[int, int]]

    def __post_init__(self):
        pairs = set()
        for a, b in self.directed:
            if a == b:
                raise GraphError("self-loop in pattern")
            key = (min(a, b), max(a, b))
            if key in pairs:
                raise GraphError("multiple edges on one node pair")
            pairs.add(key)
        for a, b in self.undirected:
            if a >= b:
                raise GraphError("undirected edges must be stored low-high")
            if (a, b) in pairs:
                raise GraphError("multiple edges on one node pair")
            pairs.add((a, b))

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def skeleton(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            {(min(a, b), max(a, b)) for a, b in self.directed} | set(self.undirected)
        )

    @property
    def num_edges(self) -> int:
        return len(self.directed) + len(self.undirected)


@dataclass(frozen=True)
class RandomGraphSpec:
    """Parameters for random DAG generation."""

    num_nodes: int
    avg_degree: float
    generator: str = "erdosRenyiForward"
    alpha: float = 0.41
    beta: float = 0.54
    delta_in: float = 0.2
    delta_out: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.num_nodes < 1:
            raise GraphError("num_nodes must be positive")
        if self.avg_degree < 0:
            raise GraphError("avg_degree must be nonnegative")
        if self.generator == "erdosRenyiForward":
            if self.avg_degree > self.num_nodes - 1:
                raise GraphError("avg_degree may not exceed num_nodes - 1")
        elif self.generator == "scaleFree":
            if self.alpha + self.beta > 1 + 1e-12:
                raise GraphError("alpha + beta must be at most 1")
            if self.delta_in < 0 or self.delta_out < 0:
                raise GraphError("delta_in and delta_out must be nonnegative")
        else:
            raise GraphError(f"unknown generator {self.generator!r}")


def d_separated(g: Dag, x, y, z: Iterable) -> bool:
    """True iff every path between x and y is blocked given conditioning set z.

    A path is blocked iff it contains a non-collider in z or a collider with
    no descendant in z. Uses the linear-time reachability formulation rather
    than path enumeration.
    """
    xi = g.index(x) if isinstance(x, str) else int(x)
    yi = g.index(y) if isinstance(y, str) else int(y)
    zi = {g.index(w) if isinstance(w, str) else int(w) for w in z}
    for v in (xi, yi):
        if not 0 <= v < g.num_nodes:
            raise GraphError(f"node index {v} out of range")
    for v in zi:
        if not 0 <= v < g.num_nodes:
            raise GraphError(f"node index {v} out of range")
    if xi == yi:
        raise GraphError("d-separation query requires distinct endpoints")
    if xi in zi or yi in zi:
        raise GraphError("conditioning set must exclude the endpoints")

    # Colliders pass flow iff they have a descendant in z.
    z_closure = zi | g.ancestors(zi)
    children = [g.children(v) for v in range(g.num_nodes)]

    UP, DOWN = 0, 1  # direction of travel into the node: UP = via an outgoing edge
    seen = set()
    stack = [(xi, UP)]
    while stack:
        v, direction = stack.pop()
        if (v, direction) in seen:
            continue
        seen.add((v, direction))
        if v == yi:
            return False
        if direction == UP and v not in zi:
            for p in g.parents[v]:
                stack.append((p, UP))
            for c in children[v]:
                stack.append((c, DOWN))
        elif direction == DOWN:
            if v not in zi:
                for c in children[v]:
                    stack.append((c, DOWN))
            if v in z_closure:
                for p in g.parents[v]:
                    stack.append((p, UP))
    return True


def _meek_closure(nodes, directed: set, undirected: set) -> tuple[set, set]:
    """Close a pattern under the orientation rules for compelled edges."""
    adj = {}
    for a, b in list(directed) + list(undirected):
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)

    def adjacent(a, b):
        return b in adj.get(a, set())

    changed = True
    while changed:
        changed = False
        for a, b in list(undirected):
            for x, y in ((a, b), (b, a)):
                # R1: w -> x, x - y, w and y nonadjacent  =>  x -> y
                if any(
                    (w, x) in directed and not adjacent(w, y)
                    for w in adj.get(x, set())
                ):
                    undirected.discard((a, b))
                    directed.add((x, y))
                    changed = True
                    break
                # R2: x -> w -> y with x - y  =>  x -> y
                if any(
                    (x, w) in directed and (w, y) in directed
                    for w in adj.get(x, set())
                ):
                    undirected.discard((a, b))
                    directed.add((x, y))
                    changed = True
                    break
                # R3: x - w1, x - w2, w1 -> y, w2 -> y, w1 and w2 nonadjacent
                ws = [
                    w
                    for w in adj.get(x, set())
                    if (w, y) in directed
                    and ((min(x, w), max(x, w)) in undirected)
                ]
                if any(
                    not adjacent(w1, w2)
                    for w1, w2 in itertools.combinations(ws, 2)
                ):
                    undirected.discard((a, b))
                    directed.add((x, y))
                    changed = True
                    break
            if changed:
                break
    return directed, undirected


def dag_to_cpdag(g: Dag) -> Cpdag:
    """The pattern for g's Markov equivalence class.

    Unshielded-collider edges are directed, the orientation rules are closed,
    and everything else is left undirected.
    """
    directed = set()
    undirected = set()
    for c in range(g.num_nodes):
        ps = sorted(g.parents[c])
        for a, b in itertools.combinations(ps, 2):
            if not g.adjacent(a, b):
                directed.add((a, c))
                directed.add((b, c))
    for p, c in g.edges():
        if (p, c) not in directed:
            undirected.add((min(p, c), max(p, c)))
    directed, undirected = _meek_closure(range(g.num_nodes), directed, undirected)
    return Cpdag(g.nodes, frozenset(directed), frozenset(undirected))


def generate_dag(spec: RandomGraphSpec) -> Dag:
    """Random DAG per spec; identical seeds give identical graphs."""
    rng = np.random.default_rng(spec.seed)
    if spec.generator == "erdosRenyiForward":
        return _erdos_renyi_forward(spec.num_nodes, spec.avg_degree, rng)
    return _scale_free(spec, rng)


def _erdos_renyi_forward(n: int, avg_degree: float, rng) -> Dag:
    m = round(n * avg_degree / 2)
    all_pairs = n * (n - 1) // 2
    if m > all_pairs:
        raise GraphError(f"cannot place {m} edges on {n} nodes")
    chosen = rng.choice(all_pairs, size=m, replace=False) if m > 0 else []
    pairs = list(itertools.combinations(range(n), 2))
    # Random causal order via a uniform relabeling; edges point low rank -> high rank.
    rank = rng.permutation(n)
    parents = [set() for _ in range(n)]
    for k in chosen:
        a, b = pairs[int(k)]
        if rank[a] < rank[b]:
            parents[b].add(a)
        else:
            parents[a].add(b)
    return Dag(tuple(default_node_names(n)), tuple(frozenset(p) for p in parents))


def _scale_free(spec: RandomGraphSpec, rng) -> Dag:
    """Directed preferential attachment, collapsed to a simple DAG.

    Multi-edges and self-loops from the attachment process are dropped, and
    every surviving edge is oriented from the earlier-created node to the
    later-created one, which forces acyclicity.
    """
    n = spec.num_nodes
    alpha, beta = spec.alpha, spec.beta
    din, dout = spec.delta_in, spec.delta_out
    in_deg = [0]
    out_deg = [0]
    pairs = set()

    def pick_by_in():
        weights = np.array(in_deg, dtype=float) + din
        if weights.sum() <= 0:
            return int(rng.integers(len(in_deg)))
        return int(rng.choice(len(in_deg), p=weights / weights.sum()))

    def pick_by_out():
        weights = np.array(out_deg, dtype=float) + dout
        if weights.sum() <= 0:
            return int(rng.integers(len(out_deg)))
        return int(rng.choice(len(out_deg), p=weights / weights.sum()))

    max_steps = 200 * n + 1000
    for _ in range(max_steps):
        if len(in_deg) >= n:
            break
        r = rng.random()
        if r < alpha:
            w = pick_by_in()
            v = len(in_deg)
            in_deg.append(0)
            out_deg.append(0)
            out_deg[v] += 1
            in_deg[w] += 1
            pairs.add((v, w))
        elif r < alpha + beta:
            u = pick_by_out()
            w = pick_by_in()
            if u != w:
                out_deg[u] += 1
                in_deg[w] += 1
                pairs.add((u, w))
        else:
            u = pick_by_out()
            v = len(in_deg)
            in_deg.append(0)
            out_deg.append(0)
            out_deg[u] += 1
            in_deg[v] += 1
            pairs.add((u, v))

    parents = [set() for _ in range(n)]
    for a, b in pairs:
        lo, hi = min(a, b), max(a, b)
        if lo != hi and hi < n:
            parents[hi].add(lo)
    return Dag(tuple(default_node_names(n)), tuple(frozenset(p) for p in parents))


def format_graph_text(g: Dag | Cpdag) -> str:
    """Graph text block: node list then numbered edge lines, LF line endings."""
    lines = ["Graph Nodes:", ";".join(g.nodes), "", "Graph Edges:"]
    k = 1
    if isinstance(g, Dag):
        for p, c in g.edges():
            lines.append(f"{k}. {g.nodes[p]} --> {g.nodes[c]}")
            k += 1
    else:
        for a, b in sorted(g.directed):
            lines.append(f"{k}. {g.nodes[a]} --> {g.nodes[b]}")
            k += 1
        for a, b in sorted(g.undirected):
            lines.append(f"{k}. {g.nodes[a]} --- {g.nodes[b]}")
            k += 1
    return "\n".join(lines) + "\n"


def parse_graph_text(text: str) -> Dag:
    """Parse a graph text block into a Dag; raises GraphParseError on bad input."""
    lines = text.split("\n")
    try:
        header = next(i for i, ln in enumerate(lines) if ln.strip() == "Graph Nodes:")
    except StopIteration:
        raise GraphParseError("missing 'Graph Nodes:' line") from None
    if header + 1 >= len(lines) or not lines[header + 1].strip():
        raise GraphParseError("missing node list after 'Graph Nodes:'")
    nodes = [s.strip() for s in lines[header + 1].split(";") if s.strip()]
    if len(set(nodes)) != len(nodes):
        raise GraphParseError(f"duplicate node name in line: {lines[header + 1]!r}")
    try:
        edge_header = next(
            i for i, ln in enumerate(lines) if ln.strip() == "Graph Edges:"
        )
    except StopIteration:
        raise GraphParseError("missing 'Graph Edges:' line") from None

    index = {name: i for i, name in enumerate(nodes)}
    edges = []
    seen_pairs = set()
    children = {i: set() for i in range(len(nodes))}

    def reaches(a, b):
        stack, seen = [a], set()
        while stack:
            v = stack.pop()
            if v == b:
                return True
            for c in children[v]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return False

    for raw in lines[edge_header + 1:]:
        line = raw.strip()
        if not line:
            continue
        head, _, rest = line.partition(". ")
        if not head.isdigit() or not rest:
            raise GraphParseError(f"malformed edge line: {raw!r}")
        parts = rest.split()
        if len(parts) != 3 or parts[1] != "-->":
            raise GraphParseError(f"malformed edge line: {raw!r}")
        a, b = parts[0], parts[2]
        if a not in index or b not in index:
            raise GraphParseError(f"unknown node in edge line: {raw!r}")
        pair = (min(index[a], index[b]), max(index[a], index[b]))
        if pair in seen_pairs:
            raise GraphParseError(f"duplicate edge in line: {raw!r}")
        seen_pairs.add(pair)
        if reaches(index[b], index[a]):
            raise GraphParseError(f"edge creates a cycle in line: {raw!r}")
        children[index[a]].add(index[b])
        edges.append((a, b))
    try:
        return Dag.from_edges(nodes, edges)
    except GraphError as exc:
        raise GraphParseError(str(exc)) from None
