"""Graph models by name and the finite-n versus limit comparison harness."""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import BaseModel, Field, field_validator

from app.core.allocator import EmpiricalLoadDistribution, exact_loads
from app.core.degseq_models import (
    DegreeDistribution,
    Seed,
    erdos_renyi_nm,
    make_rng,
    pairing_model,
    random_regular_graph,
    sample_degree_sequence,
)
from app.core.densest import rho_maxflow
from app.core.graph import Graph
from app.core.rde import DEFAULT_T_GRID, PredictedCurve, predicted_load_cdf, rho_of_mu
from app.utils.config import settings
from app.utils.exceptions import SpecError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GraphModel:
    """``er`` / ``er:<mean degree>`` or a degree distribution spec."""

    spec: str
    dist: Optional[DegreeDistribution]
    er_mean: Optional[float] = None

    @property
    def is_er(self) -> bool:
        return self.dist is None or self.er_mean is not None

    @property
    def limit(self) -> DegreeDistribution:
        """Degree law of the local weak limit."""
        if self.er_mean is not None:
            return DegreeDistribution.poisson(self.er_mean)
        if self.dist is None:
            raise SpecError("plain 'er' needs a mean degree (er:<c>) to have a limit")
        return self.dist

    @classmethod
    def parse(cls, spec: str) -> "GraphModel":
        kind, _, arg = spec.strip().partition(":")
        if kind == "er":
            if not arg:
                return cls(spec, None)
            try:
                mean = float(arg)
            except ValueError as e:
                raise SpecError(f"invalid mean degree in {spec!r}") from e
            if mean < 0:
                raise SpecError(f"negative mean degree in {spec!r}")
            return cls(spec, None, mean)
        return cls(spec, DegreeDistribution.parse(spec))

    def sample(self, n: int, seed: Seed = None, m: Optional[int] = None, keep_multi: bool = False) -> Graph:
        rng = make_rng(seed)
        if self.is_er:
            if m is None:
                if self.er_mean is None:
                    raise SpecError("model 'er' needs an edge count")
                m = int(round(self.er_mean * n / 2))
            return erdos_renyi_nm(n, m, rng)
        support = np.flatnonzero(self.dist.pmf)
        if len(support) == 1:
            # uniform simple regular graph rather than a thinned pairing
            return random_regular_graph(int(support[0]), n, rng)
        return pairing_model(sample_degree_sequence(self.dist, n, rng), rng, keep_multi=keep_multi)


class ExperimentConfig(BaseModel):
    model: str
    n_grid: List[int] = Field(default_factory=lambda: [500, 2000, 5000])
    replicates: int = 10
    seed: Optional[int] = None
    t_grid: List[float] = Field(default_factory=lambda: DEFAULT_T_GRID.tolist())
    pool_size: int = settings.POOL_SIZE
    samples: int = settings.OBJECTIVE_SAMPLES
    rho_tol: float = settings.RHO_TOL
    workers: int = settings.WORKERS
    keep_multi: bool = False

    @field_validator("n_grid")
    @classmethod
    def _positive_sizes(cls, v: List[int]) -> List[int]:
        if not v or min(v) < 1:
            raise ValueError("n_grid needs positive sizes")
        return sorted(v)

    @field_validator("replicates")
    @classmethod
    def _positive_replicates(cls, v: int) -> int:
        if v < 1:
            raise ValueError("replicates must be at least 1")
        return v


@dataclass
class CompareResult:
    config: ExperimentConfig
    rows: pd.DataFrame
    summary: pd.DataFrame
    curve: PredictedCurve
    rho_mu: Optional[float]
    monotone: bool


def _replicate(model: GraphModel, n: int, replicate: int, seed: np.random.SeedSequence, t_grid, tail, keep_multi: bool) -> dict:
    g = model.sample(n, seed, keep_multi=keep_multi)
    loads, _ = exact_loads(g)
    emp = EmpiricalLoadDistribution(loads)
    rho = rho_maxflow(g).rho
    return {
        "n": n,
        "replicate": replicate,
        "m": g.m,
        "kolmogorov": emp.kolmogorov_to_curve(t_grid, tail),
        "wasserstein": emp.wasserstein_to_curve(t_grid, tail),
        "rho_num": rho.numerator,
        "rho_den": rho.denominator,
        "rho": float(rho),
        "max_load": float(loads.max(initial=0.0)),
    }


def run_compare(config: ExperimentConfig) -> CompareResult:
    """Distances between finite-n load laws and the predicted limit, plus rho(G_n) against rho(mu)."""
    model = GraphModel.parse(config.model)
    limit = model.limit
    root = np.random.SeedSequence(config.seed)
    curve_seed, rho_seed, graph_seed = root.spawn(3)
    t_grid = np.asarray(config.t_grid, dtype=float)
    curve = predicted_load_cdf(
        limit,
        t_grid,
        size=config.pool_size,
        samples=config.samples,
        seed=int(curve_seed.generate_state(1)[0]),
        workers=config.workers,
    )
    rho_mu = None
    if limit.low_degree_mass < 1.0:
        rho_mu = rho_of_mu(limit, size=config.pool_size, tol_t=config.rho_tol, seed=int(rho_seed.generate_state(1)[0]), samples=config.samples)
    else:
        logger.info(f"{limit.label} puts all mass on degrees 0 and 1; skipping rho(mu)")

    jobs = [(n, r) for n in config.n_grid for r in range(config.replicates)]
    seeds = graph_seed.spawn(len(jobs))
    logger.info(f"Running {len(jobs)} replicates of {config.model} with {config.workers} worker(s)")
    records = Parallel(n_jobs=config.workers)(
        delayed(_replicate)(model, n, r, s, curve.t, curve.tail, config.keep_multi) for (n, r), s in zip(jobs, seeds)
    )
    rows = pd.DataFrame(records).sort_values(["n", "replicate"]).reset_index(drop=True)
    summary = rows.groupby("n").agg(
        kolmogorov_median=("kolmogorov", "median"),
        kolmogorov_q10=("kolmogorov", lambda s: s.quantile(0.1)),
        kolmogorov_q90=("kolmogorov", lambda s: s.quantile(0.9)),
        wasserstein_median=("wasserstein", "median"),
        rho_median=("rho", "median"),
        rho_min=("rho", "min"),
        rho_max=("rho", "max"),
    ).reset_index()
    if rho_mu is not None:
        summary["rho_mu"] = rho_mu
        summary["rho_gap"] = (summary["rho_median"] - rho_mu).abs()
    medians = summary["kolmogorov_median"].to_numpy()
    monotone = bool(np.all(np.diff(medians) <= 1e-12))
    if not monotone:
        logger.warning(f"Median Kolmogorov distance is not non-increasing in n: {medians.tolist()}")
    return CompareResult(config, rows, summary, curve, rho_mu, monotone)
