"""
Application configuration using Pydantic settings.

Numerical defaults (iteration counts, tolerances, grid sizes) and the
service/CLI settings are loaded from environment variables or a ``.env``
file. Operations read their defaults from here; explicit arguments win.
"""

import os
from typing import List, Optional, Union

from pydantic import ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """
    Application settings loaded from environment variables.

    All settings can be overridden with environment variables.
    """

    # Application
    APP_NAME: str = "qpcocycle"
    VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: Optional[str] = None

    # Parallelism (0 = one worker per CPU)
    THREADS: int = Field(default=0, ge=0)

    # Lyapunov exponent estimation
    LE_STEPS: int = Field(default=10_000, ge=1)
    PHASE_SAMPLES: int = Field(default=8, ge=1)
    NORM_FLOOR: float = 1e-300

    # Epsilon sweeps
    SLOPE_KINK_TOL: float = 0.15
    KINK_WINDOW: int = Field(default=5, ge=2)

    # Roots and quadrature
    ROOT_CLUSTER_TOL: float = 1e-7
    SINGULAR_TOL: float = 1e-9
    QUAD_TOL: float = 1e-10
    QUAD_SPLIT_BAND: float = 0.05
    QUAD_ORDER: int = 16

    # Frequencies
    CF_DEPTH: int = Field(default=40, ge=1)

    # Spectrum approximation
    TRUNCATION_SIZE: int = Field(default=500, ge=50)
    TRUNCATION_PHASES: int = Field(default=32, ge=1)
    FLOQUET_PHASES: int = Field(default=64, ge=1)
    MID_BAND_COUNT: int = Field(default=7, ge=1)

    # HTTP surface
    API_V1_STR: str = "/api/v1"
    API_MAX_STEPS: int = 20_000
    RATE_LIMIT_PER_MINUTE: int = 30

    # Note: Using Union[str, List] to avoid pydantic-settings JSON parsing of env values
    BACKEND_CORS_ORIGINS: Union[str, List[str]] = "http://localhost:3000,http://localhost:5173"

    @field_validator("BACKEND_CORS_ORIGINS", mode="before")
    @classmethod
    def assemble_cors_origins(cls, v: Union[str, List[str]]) -> List[str]:
        """
        Parse CORS origins from environment variable.

        Supports:
        - Comma-separated string: "http://localhost,http://example.com"
        - Already parsed list: ["http://localhost"]
        - Empty string: returns empty list
        """
        if v is None or v == "":
            return []
        if isinstance(v, str):
            return [i.strip() for i in v.split(",") if i.strip()]
        elif isinstance(v, list):
            return v
        raise ValueError(f"Invalid CORS origins format: {v}")

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        return str(v).upper()

    def worker_count(self, threads: Optional[int] = None) -> int:
        """Resolve a requested worker count; 0 or None means machine parallelism."""
        requested = self.THREADS if threads is None else threads
        if requested and requested > 0:
            return requested
        return os.cpu_count() or 1

    model_config = ConfigDict(
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )


# Create global settings instance
settings = Settings()
