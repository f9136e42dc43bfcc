"""
Spectrum router.
"""

from fastapi import APIRouter, Request
from fastapi.concurrency import run_in_threadpool
from slowapi import Limiter
from slowapi.util import get_remote_address

from qpcocycle.config import settings
from qpcocycle.routers.lyapunov import check_size
from qpcocycle.schemas.config import SpectrumConfig
from qpcocycle.schemas.report import ReportRecord
from qpcocycle.services.commands import cmd_spectrum

router = APIRouter(
    prefix="/spectrum",
    tags=["Spectrum"],
    responses={
        400: {"description": "Bad request - Invalid parameters"},
        422: {"description": "Every phase sample was degenerate"},
    },
)

limiter = Limiter(key_func=get_remote_address)


@router.post("", response_model=ReportRecord)
@limiter.limit(f"{settings.RATE_LIMIT_PER_MINUTE}/minute")
async def approximate_spectrum(request: Request, config: SpectrumConfig):
    """
    Finite-section or Floquet approximation of the spectrum.

    Rate limit: RATE_LIMIT_PER_MINUTE requests per minute
    """
    check_size("N", config.N)
    return await run_in_threadpool(cmd_spectrum, config, 1)
