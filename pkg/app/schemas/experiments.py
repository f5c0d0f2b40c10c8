from pydantic import BaseModel
from typing import Any, Dict, Optional

class CompareQueued(BaseModel):
    task_id: str
    status: str
    message: str

class CompareStatus(BaseModel):
    task_id: str
    status: str
    result: Optional[Dict[str, Any]] = None
    error: Optional[str] = None
