"""
Lyapunov exponent router.

Endpoints for single exponents, eps sweeps and accelerations. Request
bodies are the CLI run configurations; responses are report records.
"""

from typing import Optional

from fastapi import APIRouter, Request
from fastapi.concurrency import run_in_threadpool
from slowapi import Limiter
from slowapi.util import get_remote_address

from qpcocycle.config import settings
from qpcocycle.exceptions import InputError
from qpcocycle.schemas.config import AccelConfig, LeConfig, SweepConfig
from qpcocycle.schemas.report import ReportRecord
from qpcocycle.services.commands import cmd_accel, cmd_le, cmd_sweep
from qpcocycle.utils.logging_config import get_logger

logger = get_logger(__name__)

router = APIRouter(
    prefix="/lyapunov",
    tags=["Lyapunov Exponents"],
    responses={
        400: {"description": "Bad request - Invalid parameters"},
        422: {"description": "Computation failed on valid parameters"},
    },
)

limiter = Limiter(key_func=get_remote_address)

RATE = f"{settings.RATE_LIMIT_PER_MINUTE}/minute"


def check_size(name: str, value: Optional[int]) -> None:
    """Reject product lengths, grid sizes and section sizes above API_MAX_STEPS."""
    if value is not None and value > settings.API_MAX_STEPS:
        raise InputError(f"{name}={value} exceeds the service limit of {settings.API_MAX_STEPS}")


def _reject_files(matrix) -> None:
    if isinstance(matrix, str):
        raise InputError("matrix must be given inline as a JSON object; file paths are not accepted")


@router.post("/le", response_model=ReportRecord)
@limiter.limit(RATE)
async def lyapunov_exponent(request: Request, config: LeConfig):
    """
    Lyapunov exponent of a Harper or user-defined cocycle.

    Returns the estimate, the backend used and, for the iterative backend,
    the convergence sequence along doubling product lengths (nats).
    """
    check_size("n", config.n)
    check_size("quad_points", config.quad_points)
    _reject_files(config.matrix)
    return await run_in_threadpool(cmd_le, config, 1)


@router.post("/sweep", response_model=ReportRecord)
@limiter.limit(RATE)
async def epsilon_sweep(request: Request, config: SweepConfig):
    """
    Complexified exponent over an eps grid.

    Rows carry eps, L, the window slope in 2*pi units and kink marks.
    """
    check_size("n", config.n)
    check_size("steps", config.steps)
    check_size("quad_points", config.quad_points)
    _reject_files(config.matrix)
    return await run_in_threadpool(cmd_sweep, config, 1)


@router.post("/accel", response_model=ReportRecord)
@limiter.limit(RATE)
async def acceleration(request: Request, config: AccelConfig):
    """
    Accelerations at the requested eps values.

    Points within one grid step of a kink report both one-sided slopes.
    """
    check_size("n", config.n)
    check_size("steps", config.steps)
    check_size("quad_points", config.quad_points)
    _reject_files(config.matrix)
    return await run_in_threadpool(cmd_accel, config, 1)
