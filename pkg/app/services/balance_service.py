import logging
from typing import Any, Dict, Optional

from app.core.allocator import epsilon_balance, exact_loads, is_balanced
from app.core.graph import Graph
from app.utils.config import settings

logger = logging.getLogger(__name__)


class BalanceService:
    async def balance(
        self,
        g: Graph,
        mode: str = "exact",
        eps: Optional[float] = None,
        delta: Optional[int] = None,
        method: str = "newton",
        tol: Optional[float] = None,
    ) -> Dict[str, Any]:
        if mode == "exact":
            _, allocation = exact_loads(g, tol=tol or settings.EXACT_TOL)
        else:
            if eps is None:
                raise ValueError("mode 'eps' needs eps")
            allocation = epsilon_balance(g, eps, delta=delta, tol=tol or settings.EPS_TOL, method=method)
        body = allocation.to_dict()
        max_load = max(body["loads"], default=0.0)
        logger.info(f"Balanced {g!r} in {mode} mode, max load {max_load:.6g}")
        return {
            "mode": mode,
            "eps": eps,
            **body,
            "balanced": is_balanced(allocation.graph, allocation).ok,
            "max_load": float(max_load),
        }
