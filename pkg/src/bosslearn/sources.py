"""Sources answering local-score and conditional-independence queries.

All sources expose a common surface over a fixed, ordered variable list:
score-capable sources implement ``local_bic(v, parents)`` (lower is better)
and CI-capable sources implement ``independent(x, y, z)``. Queries use
integer variable indices.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np
from scipy.stats import norm

from ._kernels import residual_variance
from .graph import Dag, d_separated
from .sem import Dataset

__all__ = [
    "SourceError",
    "SingularityError",
    "DatasetBic",
    "PopulationBic",
    "DsepOracle",
    "FactOracle",
    "FisherZ",
    "PopulationPartialCorr",
    "parse_facts",
    "format_facts",
]


class SourceError(Exception):
    """Invalid query against a source."""


class SingularityError(SourceError):
    """A regression or partial-correlation system was singular."""


class _Source:
    variables: tuple[str, ...]

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    def _check_pair(self, x, y, z):
        if x == y:
            raise SourceError("query requires distinct variables")
        if x in z or y in z:
            raise SourceError("conditioning set must exclude the query pair")

    @property
    def is_score_based(self) -> bool:
        return hasattr(self, "local_bic")


class _BicBase(_Source):
    """Shared BIC machinery over a (biased) covariance matrix."""

    def __init__(self, variables, cov, n, penalty_discount, caching=True):
        if penalty_discount <= 0:
            raise SourceError("penalty discount must be positive")
        self.variables = tuple(variables)
        self._cov = np.asarray(cov, dtype=float)
        self._n = float(n)
        self.penalty_discount = float(penalty_discount)
        self.caching = caching
        self._cache: dict = {}

    def residual_variance(self, v: int, parents: frozenset[int]) -> float:
        idx = np.fromiter(sorted(parents), dtype=np.int64, count=len(parents))
        rv = residual_variance(self._cov, v, idx)
        if math.isnan(rv) or rv <= 0:
            names = [self.variables[i] for i in sorted(parents)]
            raise SingularityError(
                f"singular regression of {self.variables[v]} on {names}"
            )
        return rv

    def local_bic(self, v: int, parents: frozenset[int]) -> float:
        """n*ln(RSS/n) + c*(k+1)*ln(n), lower is better."""
        if v in parents:
            raise SourceError("a variable cannot be its own parent")
        key = (v, parents)
        if self.caching:
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        rv = self.residual_variance(v, parents)
        n, c = self._n, self.penalty_discount
        score = n * math.log(rv) + c * (len(parents) + 1) * math.log(n)
        if self.caching:
            self._cache[key] = score
        return score


class DatasetBic(_BicBase):
    """Penalized Gaussian BIC from a dataset's biased sample covariance."""

    def __init__(self, dataset: Dataset, penalty_discount: float = 2.0,
                 caching: bool = True):
        x = dataset.values
        n = x.shape[0]
        centered = x - x.mean(axis=0)
        cov = centered.T @ centered / n
        super().__init__(dataset.variable_names, cov, n, penalty_discount, caching)


class PopulationBic(_BicBase):
    """BIC against an exact covariance with a pseudo sample size."""

    def __init__(self, variables, covariance, pseudo_sample_size: float = 1e6,
                 penalty_discount: float = 2.0, caching: bool = True):
        if pseudo_sample_size <= 1:
            raise SourceError("pseudo sample size must exceed 1")
        super().__init__(variables, covariance, pseudo_sample_size,
                         penalty_discount, caching)


class DsepOracle(_Source):
    """Answers CI queries by d-separation on a known true DAG."""

    def __init__(self, dag: Dag):
        self.dag = dag
        self.variables = dag.nodes
        # The same query recurs across many prefixes during blanket recovery.
        self._cache: dict = {}

    def independent(self, x: int, y: int, z: frozenset[int]) -> bool:
        self._check_pair(x, y, z)
        key = (x, y, z) if x < y else (y, x, z)
        hit = self._cache.get(key)
        if hit is None:
            hit = d_separated(self.dag, x, y, z)
            self._cache[key] = hit
        return hit


class FactOracle(_Source):
    """Answers CI queries from an explicit fact list.

    Facts are symmetric in the pair; any query not listed is dependent.
    """

    def __init__(self, variables, facts: Iterable[tuple]):
        self.variables = tuple(variables)
        self._facts = set()
        index = {name: i for i, name in enumerate(self.variables)}

        def to_index(tok):
            if isinstance(tok, str):
                if tok not in index:
                    raise SourceError(f"unknown variable {tok!r} in fact list")
                return index[tok]
            return int(tok)

        for x, y, z in facts:
            xi, yi = to_index(x), to_index(y)
            zi = frozenset(to_index(w) for w in z)
            self._facts.add((min(xi, yi), max(xi, yi), zi))

    def facts(self):
        return set(self._facts)

    def independent(self, x: int, y: int, z: frozenset[int]) -> bool:
        self._check_pair(x, y, z)
        return (min(x, y), max(x, y), frozenset(z)) in self._facts


class _PartialCorrBase(_Source):
    def __init__(self, variables, cov):
        self.variables = tuple(variables)
        self._cov = np.asarray(cov, dtype=float)

    def partial_correlation(self, x: int, y: int, z: frozenset[int]) -> float:
        idx = np.fromiter(sorted(z), dtype=np.int64, count=len(z))
        rvx = residual_variance(self._cov, x, idx)
        rvy = residual_variance(self._cov, y, idx)
        if math.isnan(rvx) or math.isnan(rvy) or rvx <= 0 or rvy <= 0:
            names = [self.variables[i] for i in sorted(z)]
            raise SingularityError(f"partial correlation undefined given {names}")
        if idx.size == 0:
            cxy = self._cov[x, y]
        else:
            sub = self._cov[np.ix_(idx, idx)]
            try:
                beta = np.linalg.solve(sub, self._cov[idx, y])
            except np.linalg.LinAlgError:
                names = [self.variables[i] for i in sorted(z)]
                raise SingularityError(
                    f"partial correlation undefined given {names}"
                ) from None
            cxy = self._cov[x, y] - self._cov[x, idx] @ beta
        return float(cxy / math.sqrt(rvx * rvy))


class FisherZ(_PartialCorrBase):
    """CI test thresholding the Fisher z-transform of the partial correlation."""

    def __init__(self, dataset: Dataset, alpha: float = 0.01):
        if not 0 < alpha < 1:
            raise SourceError("alpha must lie in (0, 1)")
        x = dataset.values
        n = x.shape[0]
        centered = x - x.mean(axis=0)
        super().__init__(dataset.variable_names, centered.T @ centered / n)
        self._n = n
        self.alpha = alpha
        self._critical = norm.ppf(1 - alpha / 2)

    def independent(self, x: int, y: int, z: frozenset[int]) -> bool:
        self._check_pair(x, y, z)
        r = self.partial_correlation(x, y, z)
        r = max(-1 + 1e-12, min(1 - 1e-12, r))
        dof = self._n - len(z) - 3
        if dof <= 0:
            raise SourceError("sample too small for this conditioning set")
        zstat = math.sqrt(dof) * math.atanh(r)
        return abs(zstat) < self._critical


class PopulationPartialCorr(_PartialCorrBase):
    """CI by exact partial correlation magnitude below epsilon."""

    def __init__(self, variables, covariance, epsilon: float = 1e-8):
        if epsilon <= 0:
            raise SourceError("epsilon must be positive")
        super().__init__(variables, covariance)
        self.epsilon = epsilon

    def independent(self, x: int, y: int, z: frozenset[int]) -> bool:
        self._check_pair(x, y, z)
        return abs(self.partial_correlation(x, y, z)) < self.epsilon


def parse_facts(text: str) -> list[tuple[str, str, tuple[str, ...]]]:
    """Parse CI-fact lines of the form ``x _||_ y | z1, z2``.

    The conditioning part is omitted for marginal facts. Variable tokens are
    kept as strings; sources map them to indices.
    """
    facts = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split("_||_")
        if len(parts) != 2 or not parts[0].strip():
            raise SourceError(f"malformed fact on line {lineno}: {raw!r}")
        x = parts[0].strip()
        y, sep, tail = parts[1].partition("|")
        y = y.strip()
        if not y:
            raise SourceError(f"malformed fact on line {lineno}: {raw!r}")
        if sep:
            z = tuple(s.strip() for s in tail.split(",") if s.strip())
            if not z:
                raise SourceError(f"empty conditioning set on line {lineno}: {raw!r}")
        else:
            z = ()
        facts.append((x, y, z))
    return facts


def format_facts(facts) -> str:
    lines = []
    for x, y, z in facts:
        if z:
            lines.append(f"{x} _||_ {y} | " + ", ".join(str(w) for w in z))
        else:
            lines.append(f"{x} _||_ {y}")
    return "\n".join(lines) + "\n"
