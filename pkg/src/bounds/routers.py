import logging

from fastapi import APIRouter, HTTPException, status
from fastapi.concurrency import run_in_threadpool

from src.exceptions import SERVER_ERROR, NumericalError
from src.pseudo_true.schemas import PseudoTrueResult
from src.pseudo_true.service import solve_pseudo_true
from .exceptions import BOUND_FAILED
from .schemas import BoundDocument, BoundsRequest
from .service import compute_bounds


logger = logging.getLogger(__name__)

bounds_router = APIRouter(tags=["Bounds"])


@bounds_router.post("/bounds", response_model=BoundDocument)
async def post_bounds(request: BoundsRequest):
    """Compute the pseudo-true fundamental and every bound for one signal description.

    - **K**: number of sinusoids, also the number of fitted harmonics.
    - **omega**: nominal fundamental in rad/sample.
    - **beta** or **offsets**: stiffness coefficient or additive frequency offsets.
    - **snr_db** or **sigma2**: noise level, as SNR over the total sinusoidal power or as a variance.

    Returns the exact MCRLB diagonal, the asymptotic MCRLB of the fundamental,
    harmonic and unstructured CRLBs, and per-harmonic ``bias_k``, ``mse_lb_k``
    and ``crlb_sine_k``.
    """
    try:
        spec = request.to_spec()
        report = await run_in_threadpool(
            compute_bounds, spec, request.N, None, request.unstructured
        )
        return report.to_document()
    except NumericalError as exc:
        logger.warning(BOUND_FAILED, exc)
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc)
        )
    except ValueError as exc:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc)
        )
    except Exception:
        logger.exception(SERVER_ERROR)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=SERVER_ERROR
        )


@bounds_router.post("/pseudo-true", response_model=PseudoTrueResult)
async def post_pseudo_true(request: BoundsRequest):
    """Least-squares harmonic approximation of the noise-free signal and its pseudo-true noise variance."""
    try:
        return await run_in_threadpool(solve_pseudo_true, request.to_spec(), request.N)
    except (NumericalError, ValueError) as exc:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc)
        )
    except Exception:
        logger.exception(SERVER_ERROR)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=SERVER_ERROR
        )
