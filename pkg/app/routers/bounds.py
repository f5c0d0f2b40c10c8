from fastapi import APIRouter, Depends
import logging
from app.routers.errors import to_http
from app.services.bounds_service import BoundsService
from app.schemas.bounds import DenseCountRequest, DenseCountResponse, ZBoundRequest, ZBoundResponse

router = APIRouter()
logger = logging.getLogger(__name__)

def get_bounds_service():
    return BoundsService()

@router.post("/z", response_model=ZBoundResponse)
async def z_bound(
    request: ZBoundRequest,
    service: BoundsService = Depends(get_bounds_service)
):
    """Admissible delta and the first-moment bound on small dense subsets"""
    try:
        result = await service.z_bound(
            t=request.t,
            theta=request.theta,
            degrees=request.degrees,
            model=request.model,
            n=request.n,
            seed=request.seed,
            target_n=request.target_n
        )
        return ZBoundResponse(**result)
    except Exception as e:
        raise to_http(e, "compute Z bound")

@router.post("/dense-counts", response_model=DenseCountResponse)
async def dense_counts(
    request: DenseCountRequest,
    service: BoundsService = Depends(get_bounds_service)
):
    """Expected dense k-set count bounds over a (k, r) grid, with optional Monte Carlo counts"""
    try:
        result = await service.dense_counts(
            k_values=request.k_values,
            r_values=request.r_values,
            theta=request.theta,
            theta_grid=request.theta_grid,
            samples=request.samples,
            degrees=request.degrees,
            model=request.model,
            n=request.n,
            seed=request.seed
        )
        return DenseCountResponse(**result)
    except Exception as e:
        raise to_http(e, "compute dense count table")
