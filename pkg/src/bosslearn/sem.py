"""Linear-Gaussian structural equation models: parameterization, exact
population covariance, and i.i.d. data simulation."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .graph import Dag, GraphError

__all__ = [
    "SemError",
    "LinearSem",
    "Dataset",
    "SimSpec",
    "parameterize_sem",
    "standardized_error_variances",
    "population_covariance",
    "simulate_data",
]


class SemError(Exception):
    """Invalid SEM specification or numeric failure."""


@dataclass(frozen=True)
class SimSpec:
    """Coefficient/variance ranges and sampling parameters.

    Coefficient signs: when coef_low > 0 the draw is a magnitude in
    [coef_low, coef_high] with an independent fair coin flip for the sign;
    when the range spans or touches zero the draw is plain uniform.
    """

    coef_low: float = 0.2
    coef_high: float = 0.8
    var_low: float = 1.0
    var_high: float = 1.0
    sample_size: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.coef_low > self.coef_high:
            raise SemError("coef_low must not exceed coef_high")
        if not 0 < self.var_low <= self.var_high:
            raise SemError("variance range must satisfy 0 < var_low <= var_high")
        if self.sample_size < 1:
            raise SemError("sample_size must be positive")


@dataclass(frozen=True)
class LinearSem:
    """A DAG with one coefficient per edge and one error variance per node."""

    dag: Dag
    coefficients: tuple[tuple[tuple[int, int], float], ...]  # ((parent, child), coef)
    error_variances: tuple[float, ...]

    def __post_init__(self):
        edges = set(self.dag.edges())
        keys = [k for k, _ in self.coefficients]
        if set(keys) != edges or len(keys) != len(edges):
            raise SemError("coefficients must cover each edge exactly once")
        if len(self.error_variances) != self.dag.num_nodes:
            raise SemError("one error variance per node required")
        if any(v <= 0 for v in self.error_variances):
            raise SemError("error variances must be strictly positive")

    @classmethod
    def from_maps(cls, dag, coef_map, variances) -> "LinearSem":
        coefs = tuple(sorted((edge, float(c)) for edge, c in coef_map.items()))
        return cls(dag, coefs, tuple(float(v) for v in variances))

    def coefficient_matrix(self) -> np.ndarray:
        """B with B[child, parent] = edge coefficient."""
        p = self.dag.num_nodes
        b = np.zeros((p, p))
        for (parent, child), c in self.coefficients:
            b[child, parent] = c
        return b


@dataclass(frozen=True)
class Dataset:
    """Named columns over an n x p matrix of i.i.d. rows."""

    variable_names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[1] != len(self.variable_names):
            raise SemError("values must be an n x p matrix matching the names")
        if vals.shape[0] < 1:
            raise SemError("dataset needs at least one row")
        if not np.all(np.isfinite(vals)):
            raise SemError("dataset contains non-finite values")
        object.__setattr__(self, "values", vals)

    @property
    def num_rows(self) -> int:
        return self.values.shape[0]

    def to_csv(self, path) -> None:
        header = ",".join(self.variable_names)
        np.savetxt(path, self.values, delimiter=",", header=header,
                   comments="", fmt="%.17g")

    @classmethod
    def from_csv(cls, path) -> "Dataset":
        if hasattr(path, "read"):
            text = path.read()
        else:
            with open(path) as fh:
                text = fh.read()
        lines = text.strip().split("\n")
        if not lines or not lines[0].strip():
            raise SemError("empty CSV")
        names = tuple(s.strip() for s in lines[0].split(","))
        try:
            values = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",",
                                ndmin=2)
        except ValueError as exc:
            raise SemError(f"malformed CSV: {exc}") from None
        return cls(names, values)


def parameterize_sem(g: Dag, spec: SimSpec) -> LinearSem:
    """Draw edge coefficients and error variances for g; seed-deterministic."""
    rng = np.random.default_rng(spec.seed)
    coef_map = {}
    for edge in g.edges():
        if spec.coef_low > 0:
            mag = rng.uniform(spec.coef_low, spec.coef_high)
            sign = 1.0 if rng.random() < 0.5 else -1.0
            coef_map[edge] = sign * mag
        else:
            coef_map[edge] = rng.uniform(spec.coef_low, spec.coef_high)
    variances = rng.uniform(spec.var_low, spec.var_high, size=g.num_nodes)
    return LinearSem.from_maps(g, coef_map, variances)


def standardized_error_variances(g: Dag, coef_map: dict) -> tuple[float, ...]:
    """Error variances making every node variance exactly 1."""
    p = g.num_nodes
    order = g.topological_order()
    sigma = np.zeros((p, p))
    omega = np.zeros(p)
    for v in order:
        ps = sorted(g.parents[v])
        b = np.array([coef_map[(q, v)] for q in ps])
        explained = b @ sigma[np.ix_(ps, ps)] @ b if ps else 0.0
        omega[v] = 1.0 - explained
        if omega[v] <= 0:
            raise SemError(f"cannot standardize: node {g.nodes[v]} over-explained")
        for u in range(p):
            if u == v:
                continue
            sigma[v, u] = sigma[u, v] = sum(
                coef_map[(q, v)] * sigma[q, u] for q in ps
            )
        sigma[v, v] = 1.0
    return tuple(omega)


def population_covariance(sem: LinearSem) -> np.ndarray:
    """Exact covariance (I - B)^-1 Omega (I - B)^-T for the SEM."""
    p = sem.dag.num_nodes
    b = sem.coefficient_matrix()
    eye_minus_b = np.eye(p) - b
    # (I - B) is unit lower-triangular in topological order, hence invertible;
    # defensive check only.
    if abs(np.linalg.det(eye_minus_b)) < 1e-300:
        raise SemError("(I - B) is numerically singular")
    inv = np.linalg.inv(eye_minus_b)
    sigma = inv @ np.diag(sem.error_variances) @ inv.T
    return (sigma + sigma.T) / 2.0


def simulate_data(sem: LinearSem, n: int, seed) -> Dataset:
    """n i.i.d. rows from the SEM, generated in topological order."""
    if n < 1:
        raise SemError("sample size must be at least 1")
    p = sem.dag.num_nodes
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((n, p)) * np.sqrt(np.asarray(sem.error_variances))
    coef = {edge: c for edge, c in sem.coefficients}
    x = np.zeros((n, p))
    for v in sem.dag.topological_order():
        col = noise[:, v].copy()
        for q in sem.dag.parents[v]:
            col += coef[(q, v)] * x[:, q]
        x[:, v] = col
    return Dataset(sem.dag.nodes, x)
