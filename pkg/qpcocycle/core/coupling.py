"""
Coupling triples (lambda1, lambda2, lambda3) of extended Harper's model.

Values may be floats or ``fractions.Fraction``; fractions keep the
duality map exact.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import FrozenSet, Iterator, Tuple, Union

from qpcocycle.exceptions import InadmissibleCoupling

Number = Union[float, Fraction]

REGIONS = ("I", "II", "III")

# Boundary equalities reported on RegionTag.on_boundary
SUM_EQ_ONE = "l1+l3=1"
L2_EQ_ONE = "l2=1"
SUM_EQ_L2 = "l1+l3=l2"
L1_EQ_L3 = "l1=l3"


def _coerce(value: Union[Real, str]) -> Number:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        text = value.strip()
        return Fraction(text) if "/" in text else float(text)
    return float(value)


@dataclass(frozen=True)
class Coupling:
    """Hopping amplitudes lambda1 (forward), lambda2 (vertical), lambda3 (backward)."""

    lambda1: Number
    lambda2: Number
    lambda3: Number

    def __post_init__(self):
        values = []
        for name in ("lambda1", "lambda2", "lambda3"):
            try:
                value = _coerce(getattr(self, name))
            except (TypeError, ValueError, ZeroDivisionError):
                raise InadmissibleCoupling(f"{name}={getattr(self, name)!r} is not a number")
            if not math.isfinite(float(value)):
                raise InadmissibleCoupling(f"{name} must be finite, got {value}")
            if value < 0:
                raise InadmissibleCoupling(f"{name} must be >= 0, got {value}")
            object.__setattr__(self, name, value)
            values.append(value)
        if not any(v > 0 for v in values):
            raise InadmissibleCoupling("at least one of lambda1, lambda2, lambda3 must be positive")

    @classmethod
    def parse(cls, text: str) -> "Coupling":
        """Parse "l1,l2,l3"; entries may be decimals or fractions such as 1/4."""
        parts = [p for p in str(text).replace(";", ",").split(",") if p.strip()]
        if len(parts) != 3:
            raise InadmissibleCoupling(f"expected three comma-separated couplings, got {text!r}")
        return cls(*parts)

    def __iter__(self) -> Iterator[Number]:
        yield self.lambda1
        yield self.lambda2
        yield self.lambda3

    def as_floats(self) -> Tuple[float, float, float]:
        return float(self.lambda1), float(self.lambda2), float(self.lambda3)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self)

    def __str__(self) -> str:
        return ",".join(str(v) if isinstance(v, Fraction) else f"{v:g}" for v in self)


@dataclass(frozen=True)
class RegionTag:
    tag: str
    on_boundary: FrozenSet[str] = frozenset()

    def __str__(self) -> str:
        if not self.on_boundary:
            return self.tag
        return f"{self.tag} [{', '.join(sorted(self.on_boundary))}]"
