"""Population dynamics for the distributional fixed point Q = F_{pi,t}(Q).

A pool of N samples stands for Q. One sweep replaces every entry by
[1 - t + xi_1 + ... + xi_D]_0^1 with D drawn from the size-biased degree law
and the xi's drawn uniformly from the previous pool. Iterating from the two
point masses at 0 and at 1 brackets every fixed point, and the objective

    (E[D] / 2) P(xi_1 + xi_2 > 1) - t P(xi_1 + ... + xi_D > t),   D ~ pi

is evaluated on both limits; the larger value estimates Phi(t), the
mean-excess function of the limiting load.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.isotonic import IsotonicRegression

from app.core.degseq_models import DegreeDistribution, Seed, make_rng
from app.utils.config import settings

logger = logging.getLogger(__name__)

MIN_POOL_SIZE = 1000
BRANCHES = ("delta0", "delta1")
DEFAULT_T_GRID = np.arange(0.0, 3.0, 0.05) + 0.0137


def parse_t_grid(spec: str) -> np.ndarray:
    """``start:stop:step`` (stop excluded) or a comma separated list."""
    if ":" in spec:
        start, stop, step = (float(x) for x in spec.split(":"))
        if step <= 0:
            raise ValueError("t-grid step must be positive")
        return np.arange(start, stop, step)
    return np.array([float(x) for x in spec.split(",")])


@dataclass
class SamplePool:
    values: np.ndarray
    generation: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.values) < MIN_POOL_SIZE:
            raise ValueError(f"pool needs at least {MIN_POOL_SIZE} entries, got {len(self.values)}")
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise ValueError("pool entries must lie in [0, 1]")

    @classmethod
    def constant(cls, value: float, size: int) -> "SamplePool":
        return cls(np.full(size, float(value)))

    def __len__(self) -> int:
        return len(self.values)

    def wasserstein(self, other: "SamplePool") -> float:
        """W1 between two equal-size empirical laws."""
        return float(np.mean(np.abs(np.sort(self.values) - np.sort(other.values))))

    def cdf(self, x) -> np.ndarray:
        s = np.sort(self.values)
        return np.searchsorted(s, np.asarray(x, dtype=float), side="right") / len(s)


def rde_update(pool: SamplePool, biased: DegreeDistribution, t: float, seed: Seed = None) -> SamplePool:
    rng = make_rng(seed)
    n = len(pool)
    D = biased.sample(n, rng)
    owners = np.repeat(np.arange(n), D)
    picks = pool.values[rng.integers(0, n, size=len(owners))]
    sums = np.bincount(owners, weights=picks, minlength=n)
    return SamplePool(np.clip(1.0 - t + sums, 0.0, 1.0), pool.generation + 1)


@dataclass
class FixedPointResult:
    pool: SamplePool
    branch: str
    converged: bool
    sweeps: int
    residual: float


def solve_fixed_point(
    dist: DegreeDistribution,
    t: float,
    size: Optional[int] = None,
    init: str = "delta0",
    tol: Optional[float] = None,
    max_sweeps: Optional[int] = None,
    seed: Seed = None,
    stable_sweeps: Optional[int] = None,
) -> FixedPointResult:
    """Iterate from a point mass until consecutive pools stay within ``tol`` in W1.

    The default tolerance is 2 / sqrt(N), above the sampling noise between
    two pools drawn from the same law.
    """
    if init not in BRANCHES:
        raise ValueError(f"init must be one of {BRANCHES}, got {init!r}")
    size = size or settings.POOL_SIZE
    tol = 2.0 / np.sqrt(size) if tol is None else tol
    max_sweeps = max_sweeps or settings.RDE_MAX_SWEEPS
    stable_sweeps = stable_sweeps or settings.RDE_STABLE_SWEEPS
    rng = make_rng(seed)
    biased = dist.size_biased()
    pool = SamplePool.constant(0.0 if init == "delta0" else 1.0, size)
    streak, residual = 0, np.inf
    for sweep in range(1, max_sweeps + 1):
        nxt = rde_update(pool, biased, t, rng)
        residual = nxt.wasserstein(pool)
        pool = nxt
        streak = streak + 1 if residual < tol else 0
        if streak >= stable_sweeps:
            return FixedPointResult(pool, init, True, sweep, residual)
    logger.warning(f"Population dynamics from {init} at t={t:g} not settled after {max_sweeps} sweeps (W1={residual:.3e})")
    return FixedPointResult(pool, init, False, max_sweeps, residual)


def _batch_mean(values: np.ndarray, batches: int) -> Tuple[float, float]:
    means = np.array([chunk.mean() for chunk in np.array_split(values, batches)])
    return float(values.mean()), float(means.std(ddof=1) / np.sqrt(batches))


def _evaluate(pool: SamplePool, dist: DegreeDistribution, t: float, samples: int, batches: int, rng: np.random.Generator) -> Dict[str, float]:
    xi = pool.values
    n = len(xi)
    D = dist.sample(samples, rng)
    owners = np.repeat(np.arange(samples), D)
    sums = np.bincount(owners, weights=xi[rng.integers(0, n, size=len(owners))], minlength=samples)
    pair = xi[rng.integers(0, n, size=samples)] + xi[rng.integers(0, n, size=samples)]
    exceed = sums > t
    term = 0.5 * dist.mean * (pair > 1.0) - t * exceed
    phi, phi_se = _batch_mean(term, batches)
    tail, tail_se = _batch_mean(exceed.astype(float), batches)
    return {"phi": phi, "stderr": phi_se, "tail": tail, "tail_stderr": tail_se}


@dataclass
class PhiEstimate:
    t: float
    phi: float
    stderr: float
    branch: str
    sweeps: int
    residual: float
    converged: bool
    tail: float
    tail_stderr: float

    @property
    def positive(self) -> bool:
        return self.phi > 3.0 * self.stderr

    def to_dict(self) -> dict:
        return {"t": self.t, "phi": self.phi, "stderr": self.stderr, "branch": self.branch, "sweeps": self.sweeps}


def phi_of_t(
    dist: DegreeDistribution,
    t: float,
    size: Optional[int] = None,
    samples: Optional[int] = None,
    batches: Optional[int] = None,
    seed: Seed = None,
    max_sweeps: Optional[int] = None,
) -> PhiEstimate:
    if dist.mean <= 0:
        raise ValueError("Phi needs a degree law with positive mean")
    samples = samples or settings.OBJECTIVE_SAMPLES
    batches = batches or settings.OBJECTIVE_BATCHES
    rng = make_rng(seed)
    results = {}
    for branch in BRANCHES:
        fp = solve_fixed_point(dist, t, size=size, init=branch, max_sweeps=max_sweeps, seed=rng)
        results[branch] = (fp, _evaluate(fp.pool, dist, t, samples, batches, rng))
    # the upper branch wins only on a strict improvement
    branch = "delta1" if results["delta1"][1]["phi"] > results["delta0"][1]["phi"] else "delta0"
    fp, est = results[branch]
    return PhiEstimate(
        t=float(t),
        phi=est["phi"],
        stderr=est["stderr"],
        branch=branch,
        sweeps=fp.sweeps,
        residual=fp.residual,
        converged=results["delta0"][0].converged and results["delta1"][0].converged,
        tail=est["tail"],
        tail_stderr=est["tail_stderr"],
    )


def rho_of_mu(
    dist: DegreeDistribution,
    size: Optional[int] = None,
    tol_t: Optional[float] = None,
    seed: Optional[int] = None,
    samples: Optional[int] = None,
    max_doublings: int = 30,
) -> float:
    """sup{t : Phi(t) > 0} by bisection; Phi counts as positive above three standard errors."""
    if dist.mean <= 0:
        return 0.0
    tol_t = tol_t or settings.RHO_TOL
    streams = np.random.SeedSequence(seed)

    def positive(t: float) -> bool:
        est = phi_of_t(dist, t, size=size, samples=samples, seed=streams.spawn(1)[0])
        return est.positive

    lower = 1.0 if dist.low_degree_mass < 1.0 else 0.0
    upper = max(dist.mean, lower + tol_t)
    for _ in range(max_doublings):
        if not positive(upper):
            break
        lower, upper = upper, 2.0 * upper
    while upper - lower > tol_t:
        mid = 0.5 * (lower + upper)
        if positive(mid):
            lower = mid
        else:
            upper = mid
    rho = 0.5 * (lower + upper)
    logger.info(f"rho({dist.label}) = {rho:.6g} +/- {tol_t:g}")
    return rho


@dataclass
class PredictedCurve:
    t: np.ndarray
    tail: np.ndarray
    tail_stderr: np.ndarray
    phi: np.ndarray
    phi_stderr: np.ndarray
    branch: List[str]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "t": self.t,
                "phi": self.phi,
                "phi_stderr": self.phi_stderr,
                "tail": self.tail,
                "tail_stderr": self.tail_stderr,
                "branch": self.branch,
            }
        )


def predicted_load_cdf(
    dist: DegreeDistribution,
    t_grid: Sequence[float] = DEFAULT_T_GRID,
    size: Optional[int] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> PredictedCurve:
    """P(load > t) on a grid, read off the objective-maximising pool at each t.

    Assumes that this pool realises the true limiting marginal when several
    fixed points exist.
    """
    grid = np.sort(np.asarray(list(t_grid), dtype=float))
    seeds = np.random.SeedSequence(seed).spawn(len(grid))
    workers = workers or settings.WORKERS
    estimates = Parallel(n_jobs=workers)(
        delayed(phi_of_t)(dist, float(t), size=size, samples=samples, seed=s) for t, s in zip(grid, seeds)
    )
    raw = np.array([e.tail for e in estimates])
    tail = IsotonicRegression(increasing=False, y_min=0.0, y_max=1.0).fit_transform(grid, raw)
    return PredictedCurve(
        t=grid,
        tail=tail,
        tail_stderr=np.array([e.tail_stderr for e in estimates]),
        phi=np.array([e.phi for e in estimates]),
        phi_stderr=np.array([e.stderr for e in estimates]),
        branch=[e.branch for e in estimates],
    )
