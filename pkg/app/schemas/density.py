from pydantic import BaseModel
from typing import List, Optional, Tuple

from app.schemas.graphs import GraphPayload

class DensityRequest(BaseModel):
    graph: GraphPayload
    brute: bool = False
    decompose: bool = False

class DensityBlock(BaseModel):
    density_num: int
    density_den: int
    vertices: List[int]

class DensityResponse(BaseModel):
    rho_num: int
    rho_den: int
    rho: float
    H: List[int]
    blocks: Optional[List[DensityBlock]] = None

class OrientRequest(BaseModel):
    graph: GraphPayload
    k: int

class OrientResponse(BaseModel):
    orientable: bool
    orientation: Optional[List[Tuple[int, int]]] = None
    violating_set: Optional[List[int]] = None
