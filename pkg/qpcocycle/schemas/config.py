"""
Run configurations for every command.

The same models validate CLI flags (merged over an optional JSON config
file) and HTTP request bodies. Field names follow the flag names with
dashes turned into underscores; ``lambda`` and ``E`` are aliases.

``model_dump(by_alias=True, exclude_none=True)`` is the normalized form:
validating it again gives back an equal config.
"""

from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import ConfigDict, Field, field_validator, model_validator

from qpcocycle.core.coupling import Coupling
from qpcocycle.core.frequency import Frequency
from qpcocycle.schemas.base import BaseSchema

Backend = Literal["iterative", "rational"]
Which = Literal["A", "B"]

PANELS = ("thouless", "duality", "jensen", "quantization", "asymptotics", "continuity", "oseledets")
Panel = Literal["thouless", "duality", "jensen", "quantization", "asymptotics", "continuity", "oseledets"]


def _check_coupling(value: Optional[str]) -> Optional[str]:
    if value is None:
        return None
    text = ",".join(part.strip() for part in str(value).replace(";", ",").split(",") if part.strip())
    Coupling.parse(text)
    return text


def _check_beta(value: str) -> str:
    text = str(value).strip()
    Frequency.parse(text)
    return text


class RunConfig(BaseSchema):
    """Base for command configurations; unknown keys are rejected."""

    model_config = ConfigDict(from_attributes=True, populate_by_name=True, extra="forbid")


# ============================================================================
# COCYCLE COMMANDS
# ============================================================================


class CocycleConfig(RunConfig):
    """Where the cocycle comes from: the Harper model or a JSON matrix description."""

    model: Optional[Literal["harper", "matrix"]] = Field(
        None, description="Cocycle source; defaults to 'matrix' when a matrix is given, else 'harper'"
    )
    coupling: Optional[str] = Field(
        None, alias="lambda", description="Harper couplings 'l1,l2,l3'", examples=["0,0.5,0"]
    )
    matrix: Optional[Union[str, Dict[str, Any]]] = Field(
        None, description="Path to a cocycle JSON file, or the JSON object itself"
    )
    beta: str = Field("golden", description="Frequency: 'p/q', a decimal, 'golden' or 'sqrt2m1'")
    energy: Union[float, Literal["mid"]] = Field(
        "mid", alias="E", description="Energy, or 'mid' for a mid-band energy of a truncated spectrum"
    )
    mid_index: Optional[int] = Field(None, ge=0, description="Which mid-band energy to use (default: middle one)")
    which: Which = Field("B", description="Harper cocycle: 'A' (polynomial) or 'B' (A divided by c)")

    @field_validator("coupling")
    @classmethod
    def validate_coupling(cls, v: Optional[str]) -> Optional[str]:
        return _check_coupling(v)

    @field_validator("beta")
    @classmethod
    def validate_beta(cls, v: str) -> str:
        return _check_beta(v)

    @model_validator(mode="after")
    def resolve_model(self) -> "CocycleConfig":
        if self.model is None:
            self.model = "matrix" if self.matrix is not None else "harper"
        if self.model == "harper" and self.coupling is None:
            raise ValueError("the harper model needs couplings (lambda = 'l1,l2,l3')")
        if self.model == "matrix" and self.matrix is None:
            raise ValueError("the matrix model needs a cocycle description (matrix)")
        return self


class LeConfig(CocycleConfig):
    eps: float = Field(0.0, description="Imaginary shift of the phase")
    n: Optional[int] = Field(None, ge=1, description="Product length (iterative backend)")
    phases: Optional[int] = Field(None, ge=1, description="Number of starting phases (iterative backend)")
    backend: Backend = Field("iterative", description="'iterative' or 'rational' (needs beta = p/q)")
    quad_points: Optional[int] = Field(None, ge=1, description="Quadrature nodes (rational backend)")

    @model_validator(mode="after")
    def rational_backend_needs_rational_beta(self) -> "LeConfig":
        if self.backend == "rational" and not Frequency.parse(self.beta).is_rational:
            raise ValueError(f"the rational backend needs beta = p/q, got {self.beta!r}")
        return self


class SweepConfig(CocycleConfig):
    which: Which = Field("A", description="Harper cocycle: 'A' (polynomial) or 'B' (A divided by c)")
    eps_min: float = Field(-0.5, description="Lower end of the eps grid")
    eps_max: float = Field(0.5, description="Upper end of the eps grid")
    steps: int = Field(41, ge=3, description="Number of grid points")
    n: Optional[int] = Field(None, ge=1)
    phases: Optional[int] = Field(None, ge=1)
    backend: Backend = "iterative"
    quad_points: Optional[int] = Field(None, ge=1)
    window: Optional[int] = Field(None, ge=2, description="Points per least-squares slope window")
    kink_tol: Optional[float] = Field(None, gt=0, description="Slope jump (2*pi units) that marks a kink")

    @model_validator(mode="after")
    def check_range(self) -> "SweepConfig":
        if not self.eps_min < self.eps_max:
            raise ValueError(f"need eps_min < eps_max, got [{self.eps_min}, {self.eps_max}]")
        if self.backend == "rational" and not Frequency.parse(self.beta).is_rational:
            raise ValueError(f"the rational backend needs beta = p/q, got {self.beta!r}")
        return self


class AccelConfig(SweepConfig):
    at: List[float] = Field(..., min_length=1, description="Points where the acceleration is read off")


# ============================================================================
# HARPER COMMANDS
# ============================================================================


class SpectrumConfig(RunConfig):
    coupling: str = Field(..., alias="lambda", description="Harper couplings 'l1,l2,l3'")
    beta: str = "golden"
    method: Literal["truncation", "floquet"] = "truncation"
    N: Optional[int] = Field(None, ge=50, description="Truncation half-width")
    theta_samples: Optional[int] = Field(None, ge=1)
    edge_filter: bool = True
    mid_bands: Optional[int] = Field(None, ge=1, description="Number of mid-band energies to report")
    emit: Literal["intervals", "points"] = Field("intervals", description="Rows: merged intervals or every point")

    @field_validator("coupling")
    @classmethod
    def validate_coupling(cls, v: Optional[str]) -> Optional[str]:
        return _check_coupling(v)

    @field_validator("beta")
    @classmethod
    def validate_beta(cls, v: str) -> str:
        return _check_beta(v)

    @model_validator(mode="after")
    def floquet_needs_rational_beta(self) -> "SpectrumConfig":
        if self.method == "floquet" and not Frequency.parse(self.beta).is_rational:
            raise ValueError(f"floquet bands need beta = p/q, got {self.beta!r}")
        return self


class RegionConfig(RunConfig):
    coupling: str = Field(..., alias="lambda", description="Harper couplings 'l1,l2,l3'")
    eps: float = 0.0

    @field_validator("coupling")
    @classmethod
    def validate_coupling(cls, v: Optional[str]) -> Optional[str]:
        return _check_coupling(v)


class DualityConfig(RunConfig):
    coupling: str = Field(..., alias="lambda", description="Harper couplings 'l1,l2,l3'")
    check: bool = Field(False, description="Run the numeric duality identity check (region I only)")
    beta: str = "golden"
    energies: Optional[List[float]] = Field(None, min_length=1, description="Energies for the check")
    mid_bands: int = Field(3, ge=1, description="Mid-band energies to check when none are given")
    n: Optional[int] = Field(None, ge=1)
    phases: Optional[int] = Field(None, ge=1)

    @field_validator("coupling")
    @classmethod
    def validate_coupling(cls, v: Optional[str]) -> Optional[str]:
        return _check_coupling(v)

    @field_validator("beta")
    @classmethod
    def validate_beta(cls, v: str) -> str:
        return _check_beta(v)


class VerifyConfig(RunConfig):
    panel: Panel = Field(..., description=f"One of {', '.join(PANELS)}")
    quick: bool = Field(False, description="Reduced sizes and widened tolerances")


COMMAND_CONFIGS = {
    "le": LeConfig,
    "sweep": SweepConfig,
    "accel": AccelConfig,
    "spectrum": SpectrumConfig,
    "region": RegionConfig,
    "duality": DualityConfig,
    "verify": VerifyConfig,
}
