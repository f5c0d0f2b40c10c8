import io
import logging
from typing import Any, Dict, Optional

from app.core.experiments import GraphModel
from app.core.graph import Graph, load_edge_list
from app.schemas.graphs import GraphPayload

logger = logging.getLogger(__name__)


def graph_from_payload(payload: GraphPayload) -> Graph:
    return Graph.from_edges(payload.n, payload.edges)


def summarize(g: Graph) -> Dict[str, Any]:
    return {
        "n": g.n,
        "m": g.m,
        "max_degree": g.max_degree,
        "edges": [tuple(e) for e in g.edges.tolist()],
    }


class GraphService:
    async def generate(self, model: str, n: int, m: Optional[int] = None, seed: Optional[int] = None, keep_multi: bool = False) -> Dict[str, Any]:
        g = GraphModel.parse(model).sample(n, seed, m=m, keep_multi=keep_multi)
        logger.info(f"Generated {g!r} from {model}")
        return summarize(g)

    async def parse_upload(self, content: bytes) -> Dict[str, Any]:
        g = load_edge_list(io.StringIO(content.decode("utf-8")))
        return summarize(g)
