import logging
import math
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from app.core.bounds import dense_count_table, z_delta_t_bound
from app.core.degseq_models import DegreeDistribution, DegreeSequence, sample_degree_sequence

logger = logging.getLogger(__name__)


def resolve_degrees(degrees: Optional[List[int]], model: Optional[str], n: Optional[int], seed: Optional[int]) -> DegreeSequence:
    if degrees is not None:
        return DegreeSequence(np.asarray(degrees))
    if model is None or n is None:
        raise ValueError("give either a degree sequence or a model with n")
    return sample_degree_sequence(DegreeDistribution.parse(model), n, seed)


def dense_count_records(table: pd.DataFrame) -> List[Dict[str, Any]]:
    """Table rows as JSON-safe dicts; NaN and overflowed values become None."""
    records = table.to_dict(orient="records")
    for row in records:
        for key, value in row.items():
            if isinstance(value, float) and not math.isfinite(value):
                row[key] = None
    return records


class BoundsService:
    async def z_bound(
        self,
        t: float,
        theta: float = 1.0,
        degrees: Optional[List[int]] = None,
        model: Optional[str] = None,
        n: Optional[int] = None,
        seed: Optional[int] = None,
        target_n: Optional[int] = None,
    ) -> Dict[str, Any]:
        d = resolve_degrees(degrees, model, n, seed)
        return z_delta_t_bound(d, t, theta, n=target_n).to_dict()

    async def dense_counts(
        self,
        k_values: List[int],
        r_values: List[int],
        theta: float = 1.0,
        theta_grid: Optional[List[float]] = None,
        samples: int = 0,
        degrees: Optional[List[int]] = None,
        model: Optional[str] = None,
        n: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> Dict[str, Any]:
        d = resolve_degrees(degrees, model, n, seed)
        table = dense_count_table(d, k_values, r_values, theta, theta_grid, samples=samples, seed=seed)
        return {"n": d.n, "samples": samples, "rows": dense_count_records(table)}
