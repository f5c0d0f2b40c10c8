from fastapi import APIRouter, Depends
import logging
from app.routers.errors import to_http
from app.services.prediction_service import PredictionService
from app.schemas.predictions import PhiRequest, PhiResponse, RhoRequest, RhoResponse

router = APIRouter()
logger = logging.getLogger(__name__)

def get_prediction_service():
    return PredictionService()

@router.post("/phi", response_model=PhiResponse)
async def predict_phi(
    request: PhiRequest,
    service: PredictionService = Depends(get_prediction_service)
):
    """Mean-excess function of the limiting load law on a t-grid"""
    try:
        result = await service.phi_curve(
            model=request.model,
            t_grid=request.t_grid,
            pool_size=request.pool_size,
            samples=request.samples,
            seed=request.seed
        )
        return PhiResponse(**result)
    except Exception as e:
        raise to_http(e, "estimate Phi")

@router.post("/rho", response_model=RhoResponse)
async def predict_rho(
    request: RhoRequest,
    service: PredictionService = Depends(get_prediction_service)
):
    """Limiting maximum density of the model"""
    try:
        result = await service.rho(
            model=request.model,
            pool_size=request.pool_size,
            samples=request.samples,
            tol=request.tol,
            seed=request.seed
        )
        return RhoResponse(**result)
    except Exception as e:
        raise to_http(e, "estimate rho")
