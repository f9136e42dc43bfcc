"""
Report records returned by every command.

The JSON layout is published in ``docs/report.schema.json``; bump
SCHEMA_VERSION when it changes.
"""

import math
from typing import Any, Dict, List, Literal, Optional, Sequence

from pydantic import Field

from qpcocycle.schemas.base import BaseSchema

SCHEMA_VERSION = "1.0"

PASS = "PASS"
FAIL = "FAIL"
INFO = "INFO"


class CheckRow(BaseSchema):
    """One line of a verification table."""

    panel: str = Field(..., description="Verification panel name")
    check: str = Field(..., description="What is compared")
    target: Optional[float] = Field(None, description="Reference value")
    computed: Optional[float] = Field(None, description="Numerical value")
    tolerance: Optional[float] = Field(None, description="Allowed |computed - target|")
    status: Literal["PASS", "FAIL", "INFO"] = Field(..., description="INFO rows are reported but not judged")
    detail: str = Field("", description="Inputs of the check")

    @classmethod
    def judge(
        cls,
        panel: str,
        check: str,
        target: float,
        computed: float,
        tolerance: float,
        detail: str = "",
    ) -> "CheckRow":
        """PASS iff |computed - target| < tolerance (NaN fails)."""
        ok = abs(computed - target) < tolerance
        return cls(
            panel=panel,
            check=check,
            target=target,
            computed=computed,
            tolerance=tolerance,
            status=PASS if ok else FAIL,
            detail=detail,
        )

    @classmethod
    def decreasing(
        cls,
        panel: str,
        check: str,
        values: Sequence[float],
        slack: float = 0.0,
        resolution: float = 0.0,
        detail: str = "",
    ) -> "CheckRow":
        """
        PASS iff every value is at most (1 + slack) times its predecessor
        plus ``resolution`` (NaN fails, fewer than two values fail).

        ``computed`` is the largest excess over that bound, <= 0 on PASS.
        """
        excess = [b - (1.0 + slack) * a - resolution for a, b in zip(values, values[1:])]
        ok = bool(excess) and all(e <= 0.0 for e in excess)
        worst = max(excess) if excess and all(math.isfinite(e) for e in excess) else math.nan
        return cls(
            panel=panel,
            check=check,
            target=0.0,
            computed=worst,
            status=PASS if ok else FAIL,
            detail=detail,
        )


class ReportRecord(BaseSchema):
    """
    Result of one command.

    ``inputs`` echoes the validated configuration, ``outputs`` holds the
    named results, ``rows`` the tabular data (sweep grid, check table,
    spectrum intervals, ...), ``diagnostics`` flag counts, noise floors and,
    on request, runtimes.
    """

    schema_version: str = Field(SCHEMA_VERSION, description="Report layout version")
    command: str = Field(..., description="Command that produced the report")
    inputs: Dict[str, Any] = Field(default_factory=dict)
    outputs: Dict[str, Any] = Field(default_factory=dict)
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    diagnostics: Dict[str, Any] = Field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return any(row.get("status") == FAIL for row in self.rows)
