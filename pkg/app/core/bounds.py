"""First-moment bounds on dense subsets of pairing-model graphs.

Edges inside a vertex set S of total degree s are stochastically dominated by
Binomial(s, s / 2m). Summing the resulting tail over all k-sets bounds the
expected number of dense k-sets, and summing that over k <= delta n bounds the
expected count Z of small subsets with at least t |S| internal edges.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from app.core.degseq_models import DegreeSequence, Seed, make_rng, pair_half_edges
from app.core.graph import Graph
from app.utils.exceptions import BoundError, InputTooLargeError

logger = logging.getLogger(__name__)

MAX_ENUMERATED_SUBSETS = 5_000_000


@dataclass(frozen=True)
class MomentParams:
    theta: float
    alpha: float
    lam: float

    @classmethod
    def from_sequence(cls, d: DegreeSequence, theta: float) -> "MomentParams":
        if theta <= 0:
            raise ValueError("theta must be positive")
        alpha = d.mean_degree
        if alpha <= 0:
            raise ValueError("degree sequence has no edges")
        return cls(theta, alpha, d.exp_moment(theta))


def _edge_count(d: DegreeSequence) -> float:
    m = d.half_edges / 2
    if m == 0:
        raise ValueError("degree sequence has no edges")
    return m


@dataclass
class BinomialDomination:
    s: int
    mean: float
    p: float

    def tail(self, r: int) -> float:
        """P(Binomial(s, p) >= r)."""
        return float(stats.binom.sf(r - 1, self.s, self.p))


def binomial_bound(d: DegreeSequence, S: Iterable[int]) -> BinomialDomination:
    m = _edge_count(d)
    s = int(d.d[list(S)].sum())
    return BinomialDomination(s=s, mean=s * s / m, p=min(1.0, s / (2 * m)))


def _pairing_counts(d: DegreeSequence, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Multiplicity matrix and loop counts of one raw pairing."""
    pairs = pair_half_edges(d.d, rng)
    loops = np.bincount(pairs[pairs[:, 0] == pairs[:, 1], 0], minlength=d.n)
    A = np.zeros((d.n, d.n), dtype=np.int64)
    off = pairs[pairs[:, 0] != pairs[:, 1]]
    np.add.at(A, (off[:, 0], off[:, 1]), 1)
    return A + A.T, loops


def _within(A: np.ndarray, loops: np.ndarray, combos: np.ndarray) -> np.ndarray:
    k = combos.shape[1]
    total = loops[combos].sum(axis=1)
    for a, b in itertools.combinations(range(k), 2):
        total += A[combos[:, a], combos[:, b]]
    return total


def _combinations(n: int, k: int) -> np.ndarray:
    count = math.comb(n, k)
    if count > MAX_ENUMERATED_SUBSETS:
        raise InputTooLargeError(f"{count} subsets of size {k} out of {n} is too many to enumerate")
    flat = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(n), k)), dtype=np.int64, count=count * k)
    return flat.reshape(count, k)


def mc_within_set_edges(d: DegreeSequence, S: Sequence[int], samples: int, seed: Seed = None) -> np.ndarray:
    """Edges (loops and repeats included) inside S over ``samples`` raw pairings."""
    rng = make_rng(seed)
    inside = np.zeros(d.n, dtype=bool)
    inside[list(S)] = True
    out = np.empty(samples, dtype=np.int64)
    for i in range(samples):
        pairs = pair_half_edges(d.d, rng)
        out[i] = int(np.count_nonzero(inside[pairs[:, 0]] & inside[pairs[:, 1]]))
    return out


@dataclass
class DenseCountBound:
    k: int
    r: int
    theta: float
    log_bound: float

    @property
    def bound(self) -> float:
        return math.exp(self.log_bound) if self.log_bound < 700 else math.inf


def _log_dense_count_bound(d: DegreeSequence, k: int, r: int, theta: float) -> float:
    m = _edge_count(d)
    total = float(np.sum(np.exp(theta * d.d)))
    return r * math.log(2 * r / (theta * theta * m)) + k * (1.0 + math.log(total) - math.log(k))


def expected_dense_count_bound(
    d: DegreeSequence,
    k: int,
    r: int,
    theta: float = 1.0,
    theta_grid: Optional[Sequence[float]] = None,
) -> DenseCountBound:
    """Bound on E[number of k-sets with at least r internal edges], minimised over ``theta_grid`` if given."""
    if k < 1 or r < 1:
        raise ValueError("k and r must be at least 1")
    thetas = list(theta_grid) if theta_grid is not None else [theta]
    if min(thetas) <= 0:
        raise ValueError("theta must be positive")
    logs = [_log_dense_count_bound(d, k, r, th) for th in thetas]
    best = int(np.argmin(logs))
    return DenseCountBound(k, r, float(thetas[best]), float(logs[best]))


def mc_dense_counts(d: DegreeSequence, k: int, r_values: Sequence[int], samples: int, seed: Seed = None) -> Dict[int, Tuple[float, float]]:
    """Monte Carlo mean and standard error of the number of k-sets with >= r internal edges."""
    rng = make_rng(seed)
    combos = _combinations(d.n, k)
    r_values = list(r_values)
    counts = np.zeros((samples, len(r_values)))
    for i in range(samples):
        A, loops = _pairing_counts(d, rng)
        inside = _within(A, loops, combos)
        counts[i] = [np.count_nonzero(inside >= r) for r in r_values]
    means = counts.mean(axis=0)
    stderr = counts.std(axis=0, ddof=1) / np.sqrt(samples) if samples > 1 else np.zeros(len(r_values))
    return {r: (float(mu), float(se)) for r, mu, se in zip(r_values, means, stderr)}


DENSE_COUNT_COLUMNS = ["k", "r", "theta", "log_bound", "bound", "mc_mean", "mc_stderr"]


def dense_count_table(
    d: DegreeSequence,
    k_values: Sequence[int],
    r_values: Sequence[int],
    theta: float = 1.0,
    theta_grid: Optional[Sequence[float]] = None,
    samples: int = 0,
    seed: Seed = None,
) -> pd.DataFrame:
    """First-moment bound on dense k-set counts next to its Monte Carlo estimate, one row per (k, r).

    With ``samples == 0`` the Monte Carlo columns are left empty.
    """
    rng = make_rng(seed)
    rows = []
    for k in k_values:
        mc = mc_dense_counts(d, k, r_values, samples, rng) if samples > 0 else {}
        for r in r_values:
            b = expected_dense_count_bound(d, k, r, theta, theta_grid)
            mean, stderr = mc.get(r, (math.nan, math.nan))
            rows.append((k, r, b.theta, b.log_bound, b.bound, mean, stderr))
    logger.info(f"Dense count table over k={list(k_values)}, r={list(r_values)} with {samples} samples")
    return pd.DataFrame(rows, columns=DENSE_COUNT_COLUMNS)


@dataclass
class ZBound:
    t: float
    params: MomentParams
    delta: float
    f_delta: float
    n: int
    split: int
    bound: float
    kappa: Optional[float]

    def f(self, x: float) -> float:
        return _f(self.params, self.t, x)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "theta": self.params.theta,
            "alpha": self.params.alpha,
            "lambda": self.params.lam,
            "delta": self.delta,
            "f_delta": self.f_delta,
            "n": self.n,
            "split": self.split,
            "bound": self.bound,
            "kappa": self.kappa,
        }


def _f(p: MomentParams, t: float, x: float) -> float:
    return max(1.0, 2 * (1 + t) / (p.alpha * p.theta**2)) ** (t + 1) * math.e * p.lam * x ** (t - 1)


def z_delta_t_bound(
    d: DegreeSequence,
    t: float,
    theta: float = 1.0,
    n: Optional[int] = None,
    max_halvings: int = 200,
) -> ZBound:
    """Largest delta = 2^-j with f(delta) < 1 and the resulting bound on E[Z] at size n.

    Terms with k < split are bounded through f(split / n), the rest through
    f(delta); split ~ c ln n with c chosen so that f(delta)^split <= (ln n / n)^(t - 1).
    """
    if t <= 1:
        raise ValueError(f"t must exceed 1, got {t}")
    params = MomentParams.from_sequence(d, theta)
    delta = None
    for j in range(max_halvings + 1):
        if _f(params, t, 2.0**-j) < 1:
            delta = 2.0**-j
            break
    if delta is None:
        raise BoundError(f"f(delta) >= 1 for every delta down to 2^-{max_halvings}; increase theta")
    f_delta = _f(params, t, delta)
    n = d.n if n is None else n
    K = int(math.floor(delta * n))
    if K == 0:
        bound, split = 0.0, 0
    else:
        c = (t - 1) / -math.log(f_delta)
        split = min(K, max(1, math.ceil(c * math.log(n))))
        f_split = _f(params, t, split / n)
        head = f_split / (1 - f_split) if split > 1 else 0.0
        bound = head + f_delta**split / (1 - f_delta)
    kappa = bound / (math.log(n) / n) ** (t - 1) if n >= 2 else None
    logger.info(f"Z bound at t={t:g}: delta={delta:g}, f(delta)={f_delta:.4g}, E[Z] <= {bound:.4g} for n={n}")
    return ZBound(t=t, params=params, delta=delta, f_delta=f_delta, n=n, split=split, bound=bound, kappa=kappa)


def count_dense_subsets(g: Graph, t: float, max_size: int) -> int:
    """Subsets S with 1 <= |S| <= max_size and |E(S)| >= t |S|, by enumeration."""
    A = np.zeros((g.n, g.n), dtype=np.int64)
    if g.m:
        A[g.edges[:, 0], g.edges[:, 1]] = 1
        A += A.T
    loops = np.zeros(g.n, dtype=np.int64)
    found = 0
    for k in range(1, min(max_size, g.n) + 1):
        inside = _within(A, loops, _combinations(g.n, k))
        found += int(np.count_nonzero(inside >= t * k))
    return found
