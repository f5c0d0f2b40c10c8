from pydantic import BaseModel
from typing import List, Literal, Optional, Tuple

from app.schemas.graphs import GraphPayload

class BalanceRequest(BaseModel):
    graph: GraphPayload
    mode: Literal["eps", "exact"] = "exact"
    eps: Optional[float] = None
    delta: Optional[int] = None
    method: Literal["newton", "jacobi"] = "newton"
    tol: Optional[float] = None

class BalanceResponse(BaseModel):
    mode: str
    eps: Optional[float] = None
    loads: List[float]
    theta: List[Tuple[int, int, float]]
    balanced: bool
    max_load: float
