"""
Strip averages I_eps(c) = integral over T of log|c(x + i eps)| dx.

Two independent routes:

- ``i_eps_quadrature``: Gauss-Legendre panels, with the period split at the
  real parts of roots lying within QUAD_SPLIT_BAND of the line and a
  geometrically graded mesh toward each split point, so integrable log
  singularities are resolved.
- ``i_eps_exact``: Jensen's formula applied to the factorized algebraic
  polynomial q(w) = a * w^m * prod (w - w_j)^{n_j}, which gives

      I_eps = log|a| + 2 pi (N - m) eps - 2 pi sum_j n_j min(eps, eps_j)

  exactly: piecewise linear, convex, with integer slopes in 2*pi units.

``harper_i_eps_closed`` is the four-case closed form for the Harper symbol.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from qpcocycle.config import settings
from qpcocycle.core.coupling import Coupling
from qpcocycle.core.trigcore import TWO_PI, TrigPoly, evaluate, roots_on_cylinder
from qpcocycle.exceptions import IdenticallyZero
from qpcocycle.utils.logging_config import get_logger

logger = get_logger(__name__)

GRADING_RATIO = 0.15
MAX_UNIFORM_PANELS = 4096
MAX_OUTER_PANELS = 512
HEIGHT_MERGE_TOL = 1e-10


# ============================================================================
# EXACT PIECEWISE-LINEAR FORM
# ============================================================================


@dataclass(frozen=True)
class JensenSegment:
    lo: float
    hi: float
    slope: int
    intercept: float


@dataclass(frozen=True)
class JensenProfile:
    """
    Exact I_eps of a trigonometric polynomial.

    ``base_slope`` is the slope (2*pi units) above every kink; crossing the
    kink at height eps_j downward lowers it by the total multiplicity there.
    """

    constant_d: float
    base_slope: int
    kink_eps: Tuple[float, ...]
    kink_weights: Tuple[int, ...]

    def value(self, eps: float) -> float:
        total = self.constant_d + TWO_PI * self.base_slope * eps
        for height, weight in zip(self.kink_eps, self.kink_weights):
            total -= TWO_PI * weight * min(eps, height)
        return total

    __call__ = value

    def slope_at(self, eps: float) -> int:
        """Right derivative at ``eps`` in 2*pi units."""
        return self.base_slope - sum(w for h, w in zip(self.kink_eps, self.kink_weights) if h > eps)

    @property
    def accelerations(self) -> Tuple[int, ...]:
        """Slopes from the lowest segment upward."""
        slope = self.base_slope - sum(self.kink_weights)
        result = [slope]
        for weight in self.kink_weights:
            slope += weight
            result.append(slope)
        return tuple(result)

    @property
    def segments(self) -> Tuple[JensenSegment, ...]:
        bounds = [-math.inf, *self.kink_eps, math.inf]
        result = []
        for (lo, hi), slope in zip(zip(bounds[:-1], bounds[1:]), self.accelerations):
            probe = hi if math.isfinite(hi) else (lo if math.isfinite(lo) else 0.0)
            intercept = self.value(probe) - TWO_PI * slope * probe
            result.append(JensenSegment(lo=lo, hi=hi, slope=slope, intercept=intercept))
        return tuple(result)


def i_eps_exact(c: TrigPoly, cluster_tol: Optional[float] = None) -> JensenProfile:
    """
    Exact piecewise-linear I_eps from the root structure of c.

    Args:
        c: Polynomial, not identically zero
        cluster_tol: Passed to ``roots_on_cylinder``

    Returns:
        JensenProfile with kinks at the distinct root heights eps_j

    Raises:
        IdenticallyZero: if c vanishes identically

    Example:
        >>> i_eps_exact(TrigPoly.cosine()).accelerations
        (-1, 1)
    """
    roots = roots_on_cylinder(c, cluster_tol)
    # roots of equal modulus share one kink
    groups: List[List[Tuple[float, int]]] = []
    for root in sorted(roots.roots, key=lambda r: r.eps):
        if groups and root.eps - groups[-1][-1][0] <= HEIGHT_MERGE_TOL:
            groups[-1].append((root.eps, root.multiplicity))
        else:
            groups.append([(root.eps, root.multiplicity)])
    profile = JensenProfile(
        constant_d=float(np.log(abs(roots.leading))),
        base_slope=roots.shift - roots.zeros_at_origin,
        kink_eps=tuple(float(np.mean([h for h, _ in g])) for g in groups),
        kink_weights=tuple(sum(m for _, m in g) for g in groups),
    )
    for slope in profile.accelerations:
        assert float(slope).is_integer()
    return profile


# ============================================================================
# QUADRATURE
# ============================================================================


def _gl_sum(f: Callable[[np.ndarray], np.ndarray], edges: np.ndarray, order: int) -> float:
    base_x, base_w = np.polynomial.legendre.leggauss(order)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    nodes = mid[:, None] + half[:, None] * base_x[None, :]
    weights = half[:, None] * base_w[None, :]
    return float(np.sum(weights * f(nodes)))


def _graded_edges(a: float, b: float, outer_panels: int) -> np.ndarray:
    """Increasing panel edges between a and b, geometrically graded toward ``a`` (a may exceed b)."""
    length = b - a
    levels = int(math.ceil(math.log(1e-12) / math.log(GRADING_RATIO)))
    inner = [a + length * GRADING_RATIO**k for k in range(levels, 0, -1)]
    outer = list(np.linspace(a + length * GRADING_RATIO, b, outer_panels + 1))
    edges = np.array([a] + inner + outer[1:])
    if length < 0:
        edges = edges[::-1]
    return edges[np.concatenate([[True], np.diff(edges) > 0])]


def _split_integral(f: Callable[[np.ndarray], np.ndarray], splits: List[float], outer_panels: int, order: int) -> float:
    points = splits + [splits[0] + 1.0]
    total = 0.0
    for a, b in zip(points[:-1], points[1:]):
        if b - a <= 1e-15:
            continue
        mid = (a + b) / 2
        total += _gl_sum(f, _graded_edges(a, mid, outer_panels), order)
        total += _gl_sum(f, _graded_edges(b, mid, outer_panels), order)
    return total


def i_eps_quadrature(c: TrigPoly, eps: float, tol: Optional[float] = None) -> float:
    """
    Integrate log|c(x + i eps)| over one period.

    Args:
        c: Polynomial, not identically zero
        eps: Height of the integration line
        tol: Absolute tolerance (default QUAD_TOL)

    Returns:
        The strip average, finite even when c vanishes on the line

    Raises:
        IdenticallyZero: if c vanishes identically
    """
    if c.is_zero():
        raise IdenticallyZero()
    tol = settings.QUAD_TOL if tol is None else tol
    order = settings.QUAD_ORDER

    def f(x: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.maximum(np.abs(evaluate(c, x + 1j * eps)), 1e-300))

    roots = roots_on_cylinder(c)
    splits = sorted({r.x for r in roots.roots if abs(r.eps - eps) < settings.QUAD_SPLIT_BAND})

    previous = None
    if not splits:
        panels = 8
        while panels <= MAX_UNIFORM_PANELS:
            current = _gl_sum(f, np.linspace(0.0, 1.0, panels + 1), order)
            if previous is not None and abs(current - previous) < tol:
                return current
            previous, panels = current, panels * 2
    else:
        outer = 2
        while outer <= MAX_OUTER_PANELS:
            current = _split_integral(f, splits, outer, order)
            if previous is not None and abs(current - previous) < tol:
                return current
            previous, outer = current, outer * 2

    logger.warning(f"strip quadrature at eps={eps:g} stopped before reaching tol={tol:g}")
    return previous


# ============================================================================
# HARPER CLOSED FORM
# ============================================================================


def harper_i_eps_closed(coupling: Coupling, eps: float) -> float:
    """
    Closed-form I_eps of the Harper symbol c_lambda.

    With a = lambda1 exp(-2 pi eps) and d = lambda3 exp(2 pi eps), cases are
    taken in order:

    1. d >= a and a + d >= lambda2:  log lambda3 + 2 pi eps
    2. a >= d and a + d >= lambda2:  log lambda1 - 2 pi eps
    3. lambda2 >= a + d, lambda1 lambda3 > 0:
       log((lambda2 + sqrt(lambda2^2 - 4 lambda1 lambda3)) / 2)
    4. lambda2 >= a + d, lambda1 lambda3 = 0:  log lambda2

    Args:
        coupling: Admissible coupling (validated on construction)
        eps: Height of the line

    Returns:
        I_eps(c_lambda) in nats

    Example:
        >>> harper_i_eps_closed(Coupling(0, 1, 2), 0.0)  # log 2
        0.6931471805599453
    """
    l1, l2, l3 = coupling.as_floats()
    a = l1 * math.exp(-TWO_PI * eps)
    d = l3 * math.exp(TWO_PI * eps)
    if d >= a and a + d >= l2:
        return math.log(l3) + TWO_PI * eps
    if a >= d and a + d >= l2:
        return math.log(l1) - TWO_PI * eps
    if l1 * l3 > 0:
        return math.log((l2 + math.sqrt(max(l2 * l2 - 4 * l1 * l3, 0.0))) / 2)
    return math.log(l2)
