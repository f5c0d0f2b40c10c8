from fastapi import APIRouter, Depends
import logging
from app.routers.errors import to_http
from app.services.density_service import DensityService
from app.services.graph_service import graph_from_payload
from app.schemas.density import DensityRequest, DensityResponse, OrientRequest, OrientResponse

router = APIRouter()
logger = logging.getLogger(__name__)

def get_density_service():
    return DensityService()

@router.post("", response_model=DensityResponse)
async def max_density(
    request: DensityRequest,
    service: DensityService = Depends(get_density_service)
):
    """Maximum subgraph density, its largest maximiser and optionally the full decomposition"""
    try:
        result = await service.density(graph_from_payload(request.graph), brute=request.brute, decompose=request.decompose)
        return DensityResponse(**result)
    except Exception as e:
        raise to_http(e, "compute density")

@router.post("/orient", response_model=OrientResponse)
async def orient(
    request: OrientRequest,
    service: DensityService = Depends(get_density_service)
):
    """Orientation with in-degrees at most k, or a set certifying that none exists"""
    try:
        return OrientResponse(**await service.orient(graph_from_payload(request.graph), request.k))
    except Exception as e:
        raise to_http(e, "orient graph")
