import logging
from typing import Any, Dict, List, Optional

from joblib import Parallel, delayed

from app.core.degseq_models import DegreeDistribution
from app.core.experiments import GraphModel
from app.core.rde import phi_of_t, rho_of_mu
from app.utils.config import settings

logger = logging.getLogger(__name__)


class PredictionService:
    def __init__(self, workers: Optional[int] = None):
        self.workers = workers or settings.WORKERS

    def _limit(self, model: str) -> DegreeDistribution:
        return GraphModel.parse(model).limit

    async def phi_curve(
        self,
        model: str,
        t_grid: List[float],
        pool_size: Optional[int] = None,
        samples: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> Dict[str, Any]:
        dist = self._limit(model)
        seeds = [None] * len(t_grid) if seed is None else [seed + i for i in range(len(t_grid))]
        estimates = Parallel(n_jobs=self.workers)(
            delayed(phi_of_t)(dist, t, size=pool_size, samples=samples, seed=s) for t, s in zip(t_grid, seeds)
        )
        points = []
        for est in estimates:
            point = est.to_dict()
            point.update(tail=est.tail, tail_stderr=est.tail_stderr, converged=est.converged)
            points.append(point)
        return {"model": model, "points": points}

    async def rho(
        self,
        model: str,
        pool_size: Optional[int] = None,
        samples: Optional[int] = None,
        tol: Optional[float] = None,
        seed: Optional[int] = None,
    ) -> Dict[str, Any]:
        tol = tol or settings.RHO_TOL
        value = rho_of_mu(self._limit(model), size=pool_size, tol_t=tol, seed=seed, samples=samples)
        return {"model": model, "rho": value, "tol": tol}
