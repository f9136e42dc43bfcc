"""
Rotation frequencies: exact rationals and irrationals carried by their
continued-fraction convergents.

Irrational constants are expanded with mpmath at a working precision well
above what the requested depth needs; decimal literals are expanded
exactly through ``fractions.Fraction``.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import List, Optional, Tuple, Union

from mpmath import mp, mpf

from qpcocycle.config import settings
from qpcocycle.exceptions import InvalidFrequency

NAMED_CONSTANTS = ("golden", "sqrt2m1")

_RATIONAL = re.compile(r"^\s*(-?\d+)\s*/\s*(\d+)\s*$")


def continued_fraction(value: Union[Fraction, mpf, str], depth: int) -> List[int]:
    """
    Partial quotients [a0; a1, a2, ...] of ``value``, at most ``depth`` terms.

    Fractions are expanded exactly and terminate; mpmath numbers are expanded
    at a working precision sized for ``depth``.
    """
    if isinstance(value, Fraction):
        terms: List[int] = []
        x = value
        for _ in range(depth):
            a = x.numerator // x.denominator
            terms.append(a)
            rest = x - a
            if rest == 0:
                break
            x = 1 / rest
        return terms

    with mp.workdps(max(60, 3 * depth)):
        x = mpf(value)
        cutoff = mpf(10) ** (-(mp.dps - 10))
        terms = []
        for _ in range(depth):
            a = int(mp.floor(x))
            terms.append(a)
            rest = x - a
            if rest < cutoff:
                break
            x = 1 / rest
        return terms


def convergents_of(terms: List[int]) -> List[Tuple[int, int]]:
    """Convergents p_n/q_n from partial quotients via the standard recurrence."""
    result = []
    h_prev, h = 1, terms[0]
    k_prev, k = 0, 1
    result.append((h, k))
    for a in terms[1:]:
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        result.append((h, k))
    return result


@dataclass(frozen=True)
class Frequency:
    """
    Rotation number beta of the base dynamics x -> x + beta.

    Rational frequencies carry (p, q) with gcd(p, q) = 1 and 0 <= p < q.
    Irrational ones carry a high-precision value (decimal string) and the
    list of continued-fraction convergents used to approximate them.
    """

    value: float
    p: Optional[int] = None
    q: Optional[int] = None
    precise: Optional[str] = None
    convergents: Tuple[Tuple[int, int], ...] = field(default=(), compare=False)
    label: str = ""

    @property
    def is_rational(self) -> bool:
        return self.q is not None

    @property
    def kind(self) -> str:
        return "rational" if self.is_rational else "irrational"

    def __str__(self) -> str:
        return self.label

    # -- constructors --------------------------------------------------------

    @classmethod
    def rational(cls, p: int, q: int) -> "Frequency":
        """Rational frequency p/q; p is reduced mod q, gcd(p, q) must be 1."""
        if q < 1:
            raise InvalidFrequency(f"denominator must be positive, got q={q}")
        p = p % q
        if gcd(p, q) != 1:
            raise InvalidFrequency(f"p/q = {p}/{q} is not in lowest terms")
        return cls(value=p / q, p=p, q=q, precise=str(Fraction(p, q)), label=f"{p}/{q}")

    @classmethod
    def from_fraction(cls, value: Fraction, depth: Optional[int] = None, label: Optional[str] = None) -> "Frequency":
        """A decimal/fractional literal treated as a frequency with its exact convergent list."""
        depth = depth or settings.CF_DEPTH
        frac = value - (value.numerator // value.denominator)
        terms = continued_fraction(frac, depth)
        return cls(
            value=float(frac),
            precise=str(frac),
            convergents=tuple(convergents_of(terms)),
            label=label or str(value),
        )

    @classmethod
    def irrational(cls, value: mpf, depth: Optional[int] = None, label: str = "") -> "Frequency":
        depth = depth or settings.CF_DEPTH
        with mp.workdps(max(60, 3 * depth)):
            x = mpf(value) - mp.floor(mpf(value))
            terms = continued_fraction(x, depth)
            precise = mp.nstr(x, 50)
        return cls(
            value=float(x),
            precise=precise,
            convergents=tuple(convergents_of(terms)),
            label=label or precise[:20],
        )

    @classmethod
    def golden(cls, depth: Optional[int] = None) -> "Frequency":
        """(sqrt(5) - 1)/2; convergents are ratios of Fibonacci numbers."""
        with mp.workdps(120):
            return cls.irrational((mp.sqrt(5) - 1) / 2, depth, label="golden")

    @classmethod
    def sqrt2m1(cls, depth: Optional[int] = None) -> "Frequency":
        with mp.workdps(120):
            return cls.irrational(mp.sqrt(2) - 1, depth, label="sqrt2m1")

    @classmethod
    def parse(cls, text: str, depth: Optional[int] = None) -> "Frequency":
        """
        Parse the frequency grammar: "p/q", a decimal literal, or a named constant.

        Example:
            >>> Frequency.parse("2/5").q
            5
            >>> Frequency.parse("golden").convergent(5)
            Frequency(value=0.625, p=5, q=8, ...)
        """
        text = str(text).strip()
        match = _RATIONAL.match(text)
        if match:
            return cls.rational(int(match.group(1)), int(match.group(2)))
        lowered = text.lower()
        if lowered == "golden":
            return cls.golden(depth)
        if lowered == "sqrt2m1":
            return cls.sqrt2m1(depth)
        try:
            literal = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InvalidFrequency(
                f"cannot parse frequency {text!r}: expected 'p/q', a decimal, or one of {NAMED_CONSTANTS}"
            )
        return cls.from_fraction(literal, depth, label=text)

    # -- approximation -------------------------------------------------------

    def convergent(self, index: int) -> "Frequency":
        """The ``index``-th continued-fraction convergent as a rational frequency."""
        if self.is_rational:
            return self
        if not 0 <= index < len(self.convergents):
            raise InvalidFrequency(f"convergent {index} not available (have {len(self.convergents)})")
        p, q = self.convergents[index]
        return Frequency.rational(p, q)

    def convergents_between(self, q_min: int, q_max: int) -> List["Frequency"]:
        """Rational approximants with q_min <= q <= q_max, in increasing q."""
        seen = set()
        result = []
        for p, q in self.convergents:
            if q_min <= q <= q_max and q not in seen:
                seen.add(q)
                result.append(Frequency.rational(p, q))
        return result
