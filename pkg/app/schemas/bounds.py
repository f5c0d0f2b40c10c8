from pydantic import BaseModel, Field
from typing import List, Optional

class ZBoundRequest(BaseModel):
    t: float
    theta: float = Field(default=1.0, gt=0)
    degrees: Optional[List[int]] = None
    model: Optional[str] = None
    n: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None
    target_n: Optional[int] = Field(default=None, ge=1)

class ZBoundResponse(BaseModel):
    t: float
    theta: float
    alpha: float
    lam: float = Field(alias="lambda")
    delta: float
    f_delta: float
    n: int
    split: int
    bound: float
    kappa: Optional[float] = None

    model_config = {"populate_by_name": True}

class DenseCountRequest(BaseModel):
    k_values: List[int] = Field(min_length=1)
    r_values: List[int] = Field(min_length=1)
    theta: float = Field(default=1.0, gt=0)
    theta_grid: Optional[List[float]] = None
    samples: int = Field(default=0, ge=0)
    degrees: Optional[List[int]] = None
    model: Optional[str] = None
    n: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None

class DenseCountRow(BaseModel):
    k: int
    r: int
    theta: float
    log_bound: float
    bound: Optional[float] = None
    mc_mean: Optional[float] = None
    mc_stderr: Optional[float] = None

class DenseCountResponse(BaseModel):
    n: int
    samples: int
    rows: List[DenseCountRow]
