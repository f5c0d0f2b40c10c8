import logging

from fastapi import HTTPException

from app.utils.exceptions import (
    BoundError,
    ConvergenceError,
    GraphFormatError,
    InputTooLargeError,
    NotATreeError,
    SpecError,
)

logger = logging.getLogger(__name__)

INPUT_ERRORS = (ValueError, BoundError, GraphFormatError, InputTooLargeError, NotATreeError, SpecError)


def to_http(e: Exception, action: str) -> HTTPException:
    """400 for bad input, 422 for non-convergence, 500 for anything else."""
    logger.error(f"Failed to {action}: {e}")
    if isinstance(e, ConvergenceError):
        return HTTPException(status_code=422, detail=str(e))
    if isinstance(e, INPUT_ERRORS):
        return HTTPException(status_code=400, detail=str(e))
    return HTTPException(status_code=500, detail=f"Failed to {action}")
