"""
Status router.

This module contains endpoints for API status and the numerical defaults
the service runs with.
"""

from fastapi import APIRouter, Request
from slowapi import Limiter
from slowapi.util import get_remote_address

from qpcocycle.config import settings
from qpcocycle.schemas.config import PANELS
from qpcocycle.schemas.report import SCHEMA_VERSION

router = APIRouter(
    prefix="/status",
    tags=["status"],
)

limiter = Limiter(key_func=get_remote_address)


@router.get("", response_model=dict)
@limiter.limit("60/minute")
async def get_status(request: Request):
    """
    Get API status and numerical defaults.

    Rate limit: 60 requests per minute

    Returns:
        dict: Status information
    """
    return {
        "status": "ok",
        "version": settings.VERSION,
        "schema_version": SCHEMA_VERSION,
        "defaults": {
            "le_steps": settings.LE_STEPS,
            "phase_samples": settings.PHASE_SAMPLES,
            "truncation_size": settings.TRUNCATION_SIZE,
            "truncation_phases": settings.TRUNCATION_PHASES,
            "max_steps": settings.API_MAX_STEPS,
        },
        "verification_panels": list(PANELS),
    }
