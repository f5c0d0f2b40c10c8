from pydantic import BaseModel, Field
from typing import List, Optional

class PhiRequest(BaseModel):
    model: str
    t_grid: List[float] = Field(min_length=1)
    pool_size: Optional[int] = Field(default=None, ge=1000)
    samples: Optional[int] = Field(default=None, ge=100)
    seed: Optional[int] = None

class PhiPoint(BaseModel):
    t: float
    phi: float
    stderr: float
    branch: str
    sweeps: int
    tail: float
    tail_stderr: float
    converged: bool

class PhiResponse(BaseModel):
    model: str
    points: List[PhiPoint]

class RhoRequest(BaseModel):
    model: str
    pool_size: Optional[int] = Field(default=None, ge=1000)
    samples: Optional[int] = Field(default=None, ge=100)
    tol: Optional[float] = Field(default=None, gt=0)
    seed: Optional[int] = None

class RhoResponse(BaseModel):
    model: str
    rho: float
    tol: float
