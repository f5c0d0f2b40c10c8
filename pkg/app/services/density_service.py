import logging
from typing import Any, Dict

from app.core.densest import density_decomposition, k_orientable, rho_bruteforce, rho_maxflow
from app.core.graph import Graph

logger = logging.getLogger(__name__)


class DensityService:
    async def density(self, g: Graph, brute: bool = False, decompose: bool = False) -> Dict[str, Any]:
        result = rho_bruteforce(g) if brute else rho_maxflow(g)
        out = result.to_dict()
        out["rho"] = float(result.rho)
        if decompose:
            out["blocks"] = density_decomposition(g).to_dict()["blocks"]
        return out

    async def orient(self, g: Graph, k: int) -> Dict[str, Any]:
        result = k_orientable(g, k)
        logger.info(f"{g!r} is {'' if result.orientable else 'not '}{k}-orientable")
        return {
            "orientable": result.orientable,
            "orientation": result.orientation,
            "violating_set": result.violating_set,
        }
