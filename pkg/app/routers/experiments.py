from fastapi import APIRouter, HTTPException
from celery.result import AsyncResult
import logging
from app.celery_app import celery_app
from app.core.experiments import ExperimentConfig
from app.tasks import run_compare_task
from app.schemas.experiments import CompareQueued, CompareStatus

router = APIRouter()
logger = logging.getLogger(__name__)

@router.post("/compare", response_model=CompareQueued, status_code=202)
async def queue_compare(config: ExperimentConfig):
    """
    Queue a finite-n versus limit comparison

    - Runs as a Celery task
    - Poll GET /{task_id} for the result
    """
    try:
        logger.info(f"Queueing comparison for model: {config.model}")
        task = run_compare_task.delay(config.model_dump())
        return CompareQueued(task_id=task.id, status="queued", message="Comparison has been queued")
    except Exception as e:
        logger.error(f"Error queueing comparison: {str(e)}")
        raise HTTPException(status_code=500, detail=str(e))

@router.get("/{task_id}", response_model=CompareStatus)
async def get_compare_status(task_id: str):
    """Status of a queued comparison and its payload once finished"""
    try:
        result = AsyncResult(task_id, app=celery_app)
        if result.successful():
            return CompareStatus(task_id=task_id, status="finished", result=result.result)
        if result.failed():
            return CompareStatus(task_id=task_id, status="failed", error=str(result.result))
        return CompareStatus(task_id=task_id, status=result.status.lower())
    except Exception as e:
        logger.error(f"Error getting comparison status: {str(e)}")
        raise HTTPException(status_code=500, detail=str(e))
