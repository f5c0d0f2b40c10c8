from pydantic import BaseModel, Field
from typing import List, Optional, Tuple

class GraphPayload(BaseModel):
    n: int = Field(ge=0)
    edges: List[Tuple[int, int]] = Field(default_factory=list)

class GenerateGraphRequest(BaseModel):
    model: str
    n: int = Field(ge=1)
    m: Optional[int] = None
    seed: Optional[int] = None
    keep_multi: bool = False

class GraphSummary(BaseModel):
    n: int
    m: int
    max_degree: int
    edges: List[Tuple[int, int]]
