"""
Extended Harper's model router - closed forms and duality.
"""

from fastapi import APIRouter, Request
from fastapi.concurrency import run_in_threadpool
from slowapi import Limiter
from slowapi.util import get_remote_address

from qpcocycle.config import settings
from qpcocycle.routers.lyapunov import check_size
from qpcocycle.schemas.config import DualityConfig, RegionConfig
from qpcocycle.schemas.report import ReportRecord
from qpcocycle.services.commands import cmd_duality, cmd_region

router = APIRouter(
    prefix="/harper",
    tags=["Extended Harper's Model"],
    responses={
        400: {"description": "Bad request - Invalid parameters"},
    },
)

limiter = Limiter(key_func=get_remote_address)


@router.post("/region", response_model=ReportRecord)
@limiter.limit(f"{settings.RATE_LIMIT_PER_MINUTE}/minute")
async def coupling_region(request: Request, config: RegionConfig):
    """
    Region, boundary flags, closed-form exponents and criticality of a coupling.

    **Example request**:
    ```
    POST /api/v1/harper/region
    {"lambda": "0.5,0.2,0.2"}
    ```
    """
    return await run_in_threadpool(cmd_region, config, 1)


@router.post("/duality", response_model=ReportRecord)
@limiter.limit(f"{settings.RATE_LIMIT_PER_MINUTE}/minute")
async def coupling_duality(request: Request, config: DualityConfig):
    """Dual coupling; with ``check`` the numeric duality identity at mid-band energies."""
    check_size("n", config.n)
    return await run_in_threadpool(cmd_duality, config, 1)
