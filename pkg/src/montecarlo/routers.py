import logging
from typing import List

from fastapi import APIRouter, HTTPException, status
from fastapi.concurrency import run_in_threadpool

from src.exceptions import SERVER_ERROR
from .schemas import BoundCurvePoint, SweepConfig
from .service import bounds_only_sweep


logger = logging.getLogger(__name__)

sweep_router = APIRouter(prefix="/sweep", tags=["Sweep"])


@sweep_router.post("/bounds", response_model=List[BoundCurvePoint])
async def post_bound_curves(config: SweepConfig):
    """Bound curves along the configured axis, without Monte Carlo trials.

    Failures at an axis value are reported in that point's **error** field and
    leave its bound values empty.
    """
    try:
        return await run_in_threadpool(bounds_only_sweep, config)
    except Exception:
        logger.exception(SERVER_ERROR)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=SERVER_ERROR
        )
