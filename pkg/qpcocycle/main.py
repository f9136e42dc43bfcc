"""
Main FastAPI application for the qpcocycle service.

This module contains the application instance, the error mapping and
the root and health endpoints. Run it with ``qpcocycle serve`` or
``uvicorn qpcocycle.main:app``.
"""

from contextlib import asynccontextmanager

from fastapi import FastAPI, Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from slowapi import Limiter, _rate_limit_exceeded_handler
from slowapi.errors import RateLimitExceeded
from slowapi.util import get_remote_address

from qpcocycle.config import settings
from qpcocycle.exceptions import QPCocycleError
from qpcocycle.routers.harper import router as harper_router
from qpcocycle.routers.lyapunov import router as lyapunov_router
from qpcocycle.routers.spectrum import router as spectrum_router
from qpcocycle.routers.status import router as status_router
from qpcocycle.utils.logging_config import get_logger, setup_logging

logger = get_logger(__name__)

# Initialize rate limiter
limiter = Limiter(key_func=get_remote_address)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """
    Lifespan context manager for FastAPI application.

    Handles startup and shutdown events.
    """
    # Startup
    setup_logging()
    logger.info("=" * 60)
    logger.info(f"{settings.APP_NAME} API - Application starting up")
    logger.info(f"Environment: {'Development' if settings.DEBUG else 'Production'}")
    logger.info(f"API Version: {settings.API_V1_STR}")
    logger.info(f"Max product length per request: {settings.API_MAX_STEPS}")
    logger.info("=" * 60)

    yield

    # Shutdown
    logger.info("=" * 60)
    logger.info(f"{settings.APP_NAME} API - Application shutting down")
    logger.info("=" * 60)


app = FastAPI(
    title="qpcocycle API",
    description="Lyapunov exponents of quasi-periodic cocycles and extended Harper's model (values in nats)",
    version=settings.VERSION,
    openapi_url=f"{settings.API_V1_STR}/openapi.json",
    docs_url="/docs",
    redoc_url="/redoc",
    lifespan=lifespan,
)

# Add rate limiter to app state
app.state.limiter = limiter
app.add_exception_handler(RateLimitExceeded, _rate_limit_exceeded_handler)


@app.exception_handler(QPCocycleError)
async def qpcocycle_exception_handler(request: Request, exc: QPCocycleError):
    """Input errors map to 400, computation errors to 422."""
    logger.warning(f"{request.url.path}: {exc.message}")
    return JSONResponse(
        status_code=exc.status_code,
        content={"detail": exc.message, "error": exc.__class__.__name__, "status_code": exc.status_code},
    )


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    """Invalid request bodies are input errors."""
    detail = "; ".join(f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in exc.errors())
    return JSONResponse(
        status_code=status.HTTP_400_BAD_REQUEST,
        content={"detail": detail, "error": "ValidationError", "status_code": status.HTTP_400_BAD_REQUEST},
    )


@app.exception_handler(Exception)
async def unhandled_exception_handler(request: Request, exc: Exception):
    logger.exception(f"{request.url.path}: unexpected failure")
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content={"detail": "internal error", "status_code": status.HTTP_500_INTERNAL_SERVER_ERROR},
    )


# Set up CORS
if settings.BACKEND_CORS_ORIGINS:
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[str(origin) for origin in settings.BACKEND_CORS_ORIGINS],
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )


@app.get("/")
@limiter.limit(f"{settings.RATE_LIMIT_PER_MINUTE}/minute")
async def root(request: Request):
    """
    Root endpoint returning API information.
    """
    return {
        "message": f"Welcome to the {settings.APP_NAME} API",
        "version": settings.VERSION,
        "units": "nats",
        "docs": "/docs",
        "redoc": "/redoc",
    }


@app.get("/health")
@limiter.limit("60/minute")  # More generous limit for health checks
async def health_check(request: Request):
    """
    Health check endpoint.

    Rate limit: 60 requests per minute
    """
    return {"status": "healthy"}


# Include routers
app.include_router(status_router, prefix=settings.API_V1_STR)
app.include_router(lyapunov_router, prefix=settings.API_V1_STR)
app.include_router(harper_router, prefix=settings.API_V1_STR)
app.include_router(spectrum_router, prefix=settings.API_V1_STR)
