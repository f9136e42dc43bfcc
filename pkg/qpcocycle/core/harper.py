"""
Extended Harper's model.

The Jacobi operator

    (H psi)_n = c(theta + n beta) psi_{n+1} + conj(c(theta + (n-1) beta)) psi_{n-1}
                + 2cos(2 pi (theta + n beta)) psi_n

with symbol

    c(x) = l3 exp(-2 pi i (x + beta/2)) + l2 + l1 exp(2 pi i (x + beta/2)).

Its transfer cocycle A^E(x) = ((E - v(x), -cbar(x - beta)), (c(x), 0)) and
the normalized B^E = A^E / c. Closed forms cover the Lyapunov exponent on
the spectrum, the complexified exponent, the limit matrices for
eps -> +-inf, criticality, and the duality map
sigma(l1, l2, l3) = (l3/l2, 1/l2, l1/l2).

Coupling space regions:
- I:   l1 + l3 <= 1, l2 <= 1
- II:  l1 + l3 <= l2, l2 >= 1
- III: max(1, l2) <= l1 + l3
"""

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from qpcocycle.core.cocycle_engine import Cocycle, le_iterative
from qpcocycle.core.coupling import (
    L1_EQ_L3,
    L2_EQ_ONE,
    SUM_EQ_L2,
    SUM_EQ_ONE,
    Coupling,
    RegionTag,
)
from qpcocycle.core.frequency import Frequency
from qpcocycle.core.jensen import harper_i_eps_closed, i_eps_quadrature
from qpcocycle.core.trigcore import TWO_PI, Mat2C, TrigPoly
from qpcocycle.exceptions import InputError, ZeroLambda2
from qpcocycle.utils.logging_config import get_logger

logger = get_logger(__name__)

BOUNDARY_TOL = 1e-12

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"


# ============================================================================
# COCYCLES
# ============================================================================


def harper_c(coupling: Coupling, beta: float) -> TrigPoly:
    """The symbol c_lambda, including the beta/2 phase shift."""
    l1, l2, l3 = coupling.as_floats()
    half = np.exp(1j * np.pi * beta)
    return TrigPoly.from_mapping({-1: l3 / half, 0: l2, 1: l1 * half})


def harper_v() -> TrigPoly:
    """Potential v(x) = 2cos(2 pi x)."""
    return TrigPoly.cosine()


def build_cocycle(coupling: Coupling, freq: Frequency, energy: float, which: str = "A") -> Cocycle:
    """
    Transfer cocycle of the Harper operator at energy E.

    Args:
        coupling: Admissible coupling
        freq: Rotation frequency beta
        energy: Spectral parameter E
        which: "A" for the polynomial cocycle, "B" for A / c (division done
            pointwise during products)

    Returns:
        Cocycle

    Example:
        >>> A = build_cocycle(Coupling(0, 1, 0), Frequency.golden(), 0.0)
        >>> A.at(0.0).to_array().real
        array([[-2., -1.],
               [ 1.,  0.]])
    """
    which = which.upper()
    if which not in ("A", "B"):
        raise InputError(f"which must be 'A' or 'B', got {which!r}")
    beta = freq.value
    c = harper_c(coupling, beta)
    c_bar_shifted = c.conjugate_reflect().shift(-beta)
    matrix = [
        [energy - harper_v(), -c_bar_shifted],
        [c, TrigPoly.constant(0)],
    ]
    return Cocycle.from_matrix(
        freq,
        matrix,
        divisor=c if which == "B" else None,
        label=f"harper-{which}({coupling}; E={energy:g}; beta={freq.label})",
    )


def m_matrix(coupling: Coupling, beta: float, side: int = 1) -> Mat2C:
    """
    Constant limit of exp(-2 pi |eps|) * A(x + i eps) up to a unimodular phase,
    for eps -> +inf (side=1) or eps -> -inf (side=-1).
    """
    l1, _, l3 = coupling.as_floats()
    half = cmath.exp(1j * math.pi * beta)
    if side >= 0:
        return Mat2C(-1, -l1 * half, l3 / half, 0)
    return Mat2C(-1, -l3 / half, l1 * half, 0)


# ============================================================================
# REGIONS AND CLOSED FORMS
# ============================================================================


def region(coupling: Coupling) -> RegionTag:
    """
    Region of the coupling space, with every active boundary equality.

    Overlapping closed regions resolve in the order I, II, III.
    """
    l1, l2, l3 = coupling.as_floats()
    s = l1 + l3
    tol = BOUNDARY_TOL
    if s <= 1 + tol and l2 <= 1 + tol:
        tag = "I"
    elif s <= l2 + tol and l2 >= 1 - tol:
        tag = "II"
    else:
        tag = "III"
    flags = set()
    if abs(s - 1) <= tol:
        flags.add(SUM_EQ_ONE)
    if abs(l2 - 1) <= tol:
        flags.add(L2_EQ_ONE)
    if abs(s - l2) <= tol:
        flags.add(SUM_EQ_L2)
    if abs(l1 - l3) <= tol:
        flags.add(L1_EQ_L3)
    return RegionTag(tag=tag, on_boundary=frozenset(flags))


def in_region(coupling: Coupling, tag: str) -> bool:
    """Closed-region membership (boundaries belong to every adjacent region)."""
    l1, l2, l3 = coupling.as_floats()
    s = l1 + l3
    tol = BOUNDARY_TOL
    if tag == "I":
        return s <= 1 + tol and l2 <= 1 + tol
    if tag == "II":
        return s <= l2 + tol and l2 >= 1 - tol
    if tag == "III":
        return max(1.0, l2) <= s + tol
    raise InputError(f"unknown region {tag!r}")


def L_M(coupling: Coupling) -> float:
    """log|(1 + sqrt(1 - 4 l1 l3)) / 2|, principal complex root when 4 l1 l3 > 1."""
    l1, _, l3 = coupling.as_floats()
    return math.log(abs(1 + cmath.sqrt(1 - 4 * l1 * l3)) / 2)


def harper_i_closed(coupling: Coupling) -> float:
    """I(lambda) = I_0(c_lambda)."""
    return harper_i_eps_closed(coupling, 0.0)


def delta(coupling: Coupling) -> float:
    """
    Delta = L_M - I(lambda), three cases:

    - l1 >= l3, l2 <= l1 + l3:  log(|1 + sqrt(1 - 4 l1 l3)| / (2 l1))
    - l3 >= l1, l2 <= l1 + l3:  log(|1 + sqrt(1 - 4 l1 l3)| / (2 l3))
    - l2 >= l1 + l3:            log(|1 + sqrt(1 - 4 l1 l3)| / (l2 + sqrt(l2^2 - 4 l1 l3)))
    """
    l1, l2, l3 = coupling.as_floats()
    top = abs(1 + cmath.sqrt(1 - 4 * l1 * l3))
    if l1 >= l3 and l2 <= l1 + l3:
        return math.log(top / (2 * l1))
    if l3 >= l1 and l2 <= l1 + l3:
        return math.log(top / (2 * l3))
    return math.log(top / (l2 + math.sqrt(max(l2 * l2 - 4 * l1 * l3, 0.0))))


def is_regular(coupling: Coupling) -> bool:
    """eps = 0 is regular (L(A_eps) affine near 0) iff Delta < 0."""
    return delta(coupling) < -BOUNDARY_TOL


def thouless_le(coupling: Coupling) -> float:
    """
    Lyapunov exponent of B^E for E on the spectrum.

    Zero in regions II and III; max(Delta, 0) in region I.

    Example:
        >>> round(thouless_le(Coupling(0, 0.5, 0)), 6)  # log 2
        0.693147
    """
    if region(coupling).tag != "I":
        return 0.0
    return max(delta(coupling), 0.0)


class ComplexLE(NamedTuple):
    le_A_lower: float
    le_B_on_spectrum: float


def complex_le(coupling: Coupling, eps: float) -> ComplexLE:
    """
    Complexified exponents: L(A_eps) >= max(I, L_M + 2 pi |eps|), with
    equality for E on the spectrum, and L(B_eps) = L(A_eps) - I_eps.
    """
    le_a = max(harper_i_closed(coupling), L_M(coupling) + TWO_PI * abs(eps))
    return ComplexLE(le_A_lower=le_a, le_B_on_spectrum=le_a - harper_i_eps_closed(coupling, eps))


def aubry_andre_le(mu: float, eps: float = 0.0) -> float:
    """Complexified almost Mathieu exponent max(0, log|mu| + 2 pi |eps|)."""
    return max(0.0, math.log(abs(mu)) + TWO_PI * abs(eps))


def has_real_zeros(coupling: Coupling) -> bool:
    """c_lambda vanishes on the real line iff l1 = l3 with 2 l3 >= l2, or l2 = l1 + l3."""
    l1, l2, l3 = coupling.as_floats()
    tol = BOUNDARY_TOL
    if abs(l1 - l3) <= tol and 2 * l3 >= l2 - tol:
        return True
    return abs(l2 - (l1 + l3)) <= tol


def duality(coupling: Coupling) -> Coupling:
    """
    sigma(l1, l2, l3) = (l3/l2, 1/l2, l1/l2); maps I to II and fixes III.

    Fractions stay exact.

    Raises:
        ZeroLambda2: if l2 = 0
    """
    l1, l2, l3 = coupling
    if l2 == 0:
        raise ZeroLambda2()
    return Coupling(l3 / l2, 1 / l2, l1 / l2)


@dataclass(frozen=True)
class HarperVerdict:
    le_on_spectrum: float
    delta: float
    criticality: str
    L_M: float
    region: RegionTag
    regular: bool
    has_real_zeros: bool


def _in_critical_set(coupling: Coupling) -> bool:
    l1, l2, l3 = coupling.as_floats()
    s = l1 + l3
    tol = BOUNDARY_TOL
    if abs(l1 - l3) > tol:
        on_sum_segment = abs(s - 1) <= tol and l2 <= 1 + tol
        on_l2_segment = s <= 1 + tol and abs(l2 - 1) <= tol
        return on_sum_segment or on_l2_segment
    return in_region(coupling, "III") or (2 * l1 <= 1 + tol and abs(l2 - 1) <= tol)


def criticality(coupling: Coupling) -> HarperVerdict:
    """
    Classify the coupling: supercritical iff Delta > 0, critical on the
    critical set, subcritical otherwise.

    Critical set: for l1 != l3 the segments {l1 + l3 = 1, l2 <= 1} and
    {l1 + l3 <= 1, l2 = 1}; for l1 = l3 region III and {2 l1 <= 1, l2 = 1}.
    """
    d = delta(coupling)
    if d > BOUNDARY_TOL:
        verdict = SUPERCRITICAL
    elif _in_critical_set(coupling):
        verdict = CRITICAL
    else:
        verdict = SUBCRITICAL
    return HarperVerdict(
        le_on_spectrum=thouless_le(coupling),
        delta=d,
        criticality=verdict,
        L_M=L_M(coupling),
        region=region(coupling),
        regular=is_regular(coupling),
        has_real_zeros=has_real_zeros(coupling),
    )


# ============================================================================
# DUALITY IDENTITY
# ============================================================================


class DualityCheck(NamedTuple):
    residual: float
    le_original: float
    le_dual: float
    log_average: float


def duality_le_identity_check(
    coupling: Coupling,
    freq: Frequency,
    energy: float,
    n: Optional[int] = None,
    phase_samples: Optional[int] = None,
) -> DualityCheck:
    """
    Residual |L(B_lambda^E) - int log|l2 c_sigma / c_lambda| - L(B_sigma^{E/l2})|.

    Both exponents come from ``le_iterative``; the log average
    log l2 + I(c_sigma) - I(c_lambda) comes from ``i_eps_quadrature``, so
    no closed form enters the residual.

    Raises:
        InputError: if the coupling is not in region I
    """
    if not in_region(coupling, "I"):
        raise InputError(f"duality identity check needs a region I coupling, got {region(coupling)}")
    dual = duality(coupling)
    l2 = float(coupling.lambda2)
    le_original = le_iterative(build_cocycle(coupling, freq, energy, "B"), 0.0, n, phase_samples).estimate
    le_dual = le_iterative(build_cocycle(dual, freq, energy / l2, "B"), 0.0, n, phase_samples).estimate
    log_average = (
        math.log(l2)
        + i_eps_quadrature(harper_c(dual, freq.value), 0.0)
        - i_eps_quadrature(harper_c(coupling, freq.value), 0.0)
    )
    residual = abs(le_original - log_average - le_dual)
    logger.debug(f"duality check {coupling} E={energy:g}: residual {residual:.3e}")
    return DualityCheck(residual=residual, le_original=le_original, le_dual=le_dual, log_average=log_average)
