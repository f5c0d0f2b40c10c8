from fastapi import APIRouter, Depends
import logging
from app.routers.errors import to_http
from app.services.balance_service import BalanceService
from app.services.graph_service import graph_from_payload
from app.schemas.balance import BalanceRequest, BalanceResponse

router = APIRouter()
logger = logging.getLogger(__name__)

def get_balance_service():
    return BalanceService()

@router.post("", response_model=BalanceResponse)
async def balance_graph(
    request: BalanceRequest,
    service: BalanceService = Depends(get_balance_service)
):
    """Balanced (exact) or epsilon-balanced loads and allocation"""
    try:
        result = await service.balance(
            graph_from_payload(request.graph),
            mode=request.mode,
            eps=request.eps,
            delta=request.delta,
            method=request.method,
            tol=request.tol
        )
        return BalanceResponse(**result)
    except Exception as e:
        raise to_http(e, "balance graph")
