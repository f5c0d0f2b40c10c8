"""Degree distributions and random graph generators.

Every sampler takes a ``seed`` that may be an int, a ``numpy.random.SeedSequence``
or a ready ``Generator``; parallel callers split one ``SeedSequence`` into
children so replicate streams never overlap.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy import stats

from app.core.graph import Graph
from app.utils.config import settings
from app.utils.exceptions import InputTooLargeError, SpecError

logger = logging.getLogger(__name__)

Seed = Union[None, int, np.random.SeedSequence, np.random.Generator]


def make_rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_seeds(seed: Optional[int], count: int) -> List[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(count)


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    pmf: np.ndarray
    label: str = "explicit"

    def __post_init__(self):
        p = np.asarray(self.pmf, dtype=float)
        if p.ndim != 1 or not len(p):
            raise ValueError("pmf must be a non-empty vector")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"pmf must be non-negative and sum to 1, got sum {p.sum()!r}")
        object.__setattr__(self, "pmf", p)

    @classmethod
    def regular(cls, d: int) -> "DegreeDistribution":
        if d < 0:
            raise ValueError("degree must be non-negative")
        pmf = np.zeros(d + 1)
        pmf[d] = 1.0
        return cls(pmf, f"regular:{d}")

    @classmethod
    def poisson(cls, lam: float, tail: float = settings.POISSON_TAIL) -> "DegreeDistribution":
        if lam < 0:
            raise ValueError("Poisson mean must be non-negative")
        if lam == 0:
            return cls(np.array([1.0]), "poisson:0")
        kmax = int(stats.poisson.isf(tail, lam)) + 1
        pmf = stats.poisson.pmf(np.arange(kmax + 1), lam)
        return cls(pmf / pmf.sum(), f"poisson:{lam:g}")

    @classmethod
    def explicit(cls, probs: Sequence[float]) -> "DegreeDistribution":
        p = np.asarray(probs, dtype=float)
        return cls(p, "explicit:" + ",".join(f"{x:g}" for x in p))

    @classmethod
    def parse(cls, spec: str) -> "DegreeDistribution":
        """Read ``poisson:<lam>``, ``regular:<d>`` or ``explicit:<p0,p1,...>``."""
        kind, _, arg = spec.strip().partition(":")
        try:
            if kind == "poisson":
                return cls.poisson(float(arg))
            if kind == "regular":
                return cls.regular(int(arg))
            if kind == "explicit":
                return cls.explicit([float(x) for x in arg.split(",")])
        except ValueError as e:
            raise SpecError(f"invalid distribution spec {spec!r}: {e}") from e
        raise SpecError(f"unknown distribution spec {spec!r}; expected poisson:, regular: or explicit:")

    @property
    def support(self) -> np.ndarray:
        return np.arange(len(self.pmf))

    @property
    def mean(self) -> float:
        return float(self.support @ self.pmf)

    @property
    def low_degree_mass(self) -> float:
        """pi_0 + pi_1."""
        return float(self.pmf[:2].sum())

    def exp_moment(self, theta: float) -> float:
        return float(self.pmf @ np.exp(theta * self.support))

    def size_biased(self) -> "DegreeDistribution":
        """pi_hat_n = (n + 1) pi_{n+1} / mean."""
        mean = self.mean
        if mean <= 0:
            raise ValueError("size-biasing needs a positive mean")
        biased = self.support[1:] * self.pmf[1:] / mean
        return DegreeDistribution(biased / biased.sum(), f"size-biased {self.label}")

    def sample(self, size: int, seed: Seed = None) -> np.ndarray:
        return make_rng(seed).choice(len(self.pmf), size=size, p=self.pmf)

    def __repr__(self) -> str:
        return f"DegreeDistribution({self.label}, mean={self.mean:.4g})"


@dataclass(frozen=True, eq=False)
class DegreeSequence:
    d: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.d, dtype=np.int64)
        if np.any(arr < 0):
            raise ValueError("degrees must be non-negative")
        object.__setattr__(self, "d", arr)

    @property
    def n(self) -> int:
        return len(self.d)

    @property
    def half_edges(self) -> int:
        return int(self.d.sum())

    @property
    def mean_degree(self) -> float:
        return float(self.d.mean()) if self.n else 0.0

    def exp_moment(self, theta: float) -> float:
        """(1/n) sum_i exp(theta d_i)."""
        return float(np.mean(np.exp(theta * self.d)))


def sample_degree_sequence(dist: DegreeDistribution, n: int, seed: Seed = None) -> DegreeSequence:
    if n < 1:
        raise ValueError("n must be at least 1")
    d = dist.sample(n, seed).astype(np.int64)
    if d.sum() % 2:
        d[-1] += 1
    return DegreeSequence(d)


def pair_half_edges(d: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    stubs = np.repeat(np.arange(len(d)), d)
    return rng.permutation(stubs).reshape(-1, 2)


def pairing_model(seq: DegreeSequence, seed: Seed = None, keep_multi: bool = False) -> Graph:
    """Uniform pairing of half-edges; loops dropped, parallel edges dropped entirely (or kept once)."""
    if seq.half_edges % 2:
        raise ValueError(f"degree sum {seq.half_edges} is odd")
    pairs = pair_half_edges(seq.d, make_rng(seed))
    pairs = np.sort(pairs[pairs[:, 0] != pairs[:, 1]], axis=1)
    if not len(pairs):
        return Graph.empty(seq.n)
    unique, counts = np.unique(pairs, axis=0, return_counts=True)
    if not keep_multi:
        unique = unique[counts == 1]
    return Graph.from_edges(seq.n, unique)


def random_regular_graph(d: int, n: int, seed: Seed = None, max_tries: int = 100_000) -> Graph:
    """Uniform simple d-regular graph by rejection on the pairing model."""
    if (n * d) % 2 or not 0 <= d < n:
        raise ValueError(f"no simple {d}-regular graph on {n} vertices")
    rng = make_rng(seed)
    degrees = np.full(n, d, dtype=np.int64)
    for attempt in range(1, max_tries + 1):
        pairs = np.sort(pair_half_edges(degrees, rng), axis=1)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        if len(np.unique(pairs, axis=0)) == len(pairs):
            logger.debug(f"Simple {d}-regular pairing found after {attempt} attempts")
            return Graph.from_edges(n, pairs)
    raise RuntimeError(f"no simple pairing in {max_tries} attempts")


def erdos_renyi_nm(n: int, m: int, seed: Seed = None) -> Graph:
    """Uniform simple graph with exactly m edges (Floyd's sampling of pair indices)."""
    total = n * (n - 1) // 2
    if m < 0 or m > total:
        raise ValueError(f"m={m} outside [0, {total}] for n={n}")
    rng = make_rng(seed)
    chosen = set()
    for j in range(total - m, total):
        t = int(rng.integers(0, j + 1))
        chosen.add(j if t in chosen else t)
    idx = np.fromiter(chosen, dtype=np.int64, count=m)
    idx.sort()
    # pairs (i, j), i < j, enumerated row by row; row i starts at i (2n - i - 1) / 2
    rows = np.arange(n, dtype=np.int64)
    starts = rows * (2 * n - rows - 1) // 2
    i = np.searchsorted(starts, idx, side="right") - 1
    j = idx - starts[i] + i + 1
    return Graph.from_edges(n, np.column_stack([i, j]))


def sample_ugwt(dist: DegreeDistribution, depth: int, seed: Seed = None, max_vertices: int = 1_000_000) -> Graph:
    """Unimodular Galton-Watson tree cut at ``depth``: root offspring ~ pi, others ~ size-biased pi."""
    rng = make_rng(seed)
    biased = dist.size_biased() if dist.mean > 0 else dist
    edges = []
    frontier = [0]
    n = 1
    for level in range(depth):
        law = dist if level == 0 else biased
        counts = law.sample(len(frontier), rng)
        nxt = []
        for parent, c in zip(frontier, counts.tolist()):
            for _ in range(c):
                edges.append((parent, n))
                nxt.append(n)
                n += 1
        if n > max_vertices:
            raise InputTooLargeError(f"tree exceeded {max_vertices} vertices at depth {level + 1}")
        frontier = nxt
        if not frontier:
            break
    return Graph.from_edges(n, edges)
