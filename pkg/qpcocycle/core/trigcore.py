"""
Trigonometric polynomials on the complex strip and 2x2 complex matrices.

A trigonometric polynomial p(z) = sum_{|k| <= N} c_k exp(2 pi i k z) is
stored densely over the harmonic range [-N, N]. On the strip coordinate
z = x + i eps it is a Laurent polynomial in w = exp(2 pi i z), so its root
structure comes from the algebraic polynomial

    q(w) = sum_{k=0}^{2N} c_{k-N} w^k,        |w| = exp(-2 pi eps).

Roots are found from companion-matrix eigenvalues
(``numpy.polynomial.polynomial.polyroots``), polished by Newton steps and
clustered to detect multiplicities.

Orientation convention used everywhere in the package: eps increases
"upward", so the harmonic exp(2 pi i N x) has modulus exp(-2 pi N eps) on
the line Im z = eps.
"""

import cmath
import json
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P

from qpcocycle.config import settings
from qpcocycle.exceptions import IdenticallyZero
from qpcocycle.utils.logging_config import get_logger

logger = get_logger(__name__)

TWO_PI = 2.0 * np.pi

# Coefficients below this fraction of the largest one are treated as zero
# when reading off the algebraic degree and the order at the origin.
COEFF_ZERO_RTOL = 1e-14

NEWTON_STEPS = 3

ComplexLike = Union[complex, float, int, np.ndarray]


# ============================================================================
# TRIGONOMETRIC POLYNOMIALS
# ============================================================================


@dataclass(frozen=True)
class TrigPoly:
    """
    Finite Fourier series with dense coefficients over harmonics [-N, N].

    ``coeffs[k + N]`` holds c_k. Instances are immutable and hashable.
    """

    coeffs: Tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if len(coeffs) % 2 == 0:
            raise ValueError("dense coefficient vector must have odd length 2N+1")
        object.__setattr__(self, "coeffs", coeffs)

    # -- construction --------------------------------------------------------

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, complex], degree: Optional[int] = None) -> "TrigPoly":
        """Build from {harmonic index: coefficient}; ``degree`` pads the range."""
        n = max((abs(int(k)) for k in mapping), default=0)
        if degree is not None:
            if degree < n:
                raise ValueError(f"degree bound {degree} smaller than largest harmonic {n}")
            n = degree
        dense = [0j] * (2 * n + 1)
        for k, value in mapping.items():
            dense[int(k) + n] += complex(value)
        return cls(tuple(dense))

    @classmethod
    def constant(cls, value: complex) -> "TrigPoly":
        return cls((complex(value),))

    @classmethod
    def cosine(cls, amplitude: float = 1.0) -> "TrigPoly":
        """amplitude * 2cos(2 pi x)."""
        return cls.from_mapping({-1: amplitude, 1: amplitude})

    @classmethod
    def from_json(cls, payload: Union[str, Mapping[str, Any]]) -> "TrigPoly":
        """Parse ``{"coeffs": [[k, re, im], ...]}`` (a JSON string or decoded dict)."""
        data = json.loads(payload) if isinstance(payload, str) else payload
        try:
            terms = data["coeffs"]
            mapping: Dict[int, complex] = {}
            for term in terms:
                k, re, im = term
                if int(k) != k:
                    raise ValueError(f"harmonic index must be an integer, got {k}")
                mapping[int(k)] = mapping.get(int(k), 0j) + complex(float(re), float(im))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed trigonometric polynomial: {exc}") from exc
        return cls.from_mapping(mapping, degree=data.get("degree"))

    def to_json(self) -> Dict[str, List[List[float]]]:
        terms = [
            [k, float(c.real), float(c.imag)]
            for k, c in zip(self.harmonics(), self.coeffs)
            if c != 0
        ]
        return {"coeffs": terms}

    # -- inspection ----------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree bound N."""
        return (len(self.coeffs) - 1) // 2

    def harmonics(self) -> range:
        return range(-self.degree, self.degree + 1)

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.degree:
            return 0j
        return self.coeffs[k + self.degree]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=complex)

    def algebraic_coefficients(self) -> np.ndarray:
        """Coefficients of q(w), lowest power first (same layout as ``coeffs``)."""
        return self.as_array()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def trimmed(self) -> "TrigPoly":
        """Smallest symmetric degree bound holding every nonzero coefficient."""
        nonzero = [abs(k) for k, c in zip(self.harmonics(), self.coeffs) if c != 0]
        n = max(nonzero, default=0)
        offset = self.degree - n
        return TrigPoly(self.coeffs[offset:len(self.coeffs) - offset])

    # -- evaluation ----------------------------------------------------------

    def evaluate_on_circle(self, w: ComplexLike) -> ComplexLike:
        """Evaluate with w = exp(2 pi i z) already formed."""
        w = np.asarray(w, dtype=complex)
        if self.degree == 0:
            return np.full(w.shape, self.coeffs[0]) if w.shape else self.coeffs[0]
        value = P.polyval(w, self.as_array()) * w ** (-self.degree)
        return value if value.shape else complex(value)

    def eval(self, z: ComplexLike) -> ComplexLike:
        return evaluate(self, z)

    def __call__(self, z: ComplexLike) -> ComplexLike:
        return evaluate(self, z)

    # -- arithmetic ----------------------------------------------------------

    def _padded(self, degree: int) -> np.ndarray:
        pad = degree - self.degree
        return np.pad(self.as_array(), (pad, pad))

    def __add__(self, other: Union["TrigPoly", complex, float]) -> "TrigPoly":
        other = _as_trigpoly(other)
        n = max(self.degree, other.degree)
        return TrigPoly(tuple(self._padded(n) + other._padded(n)))

    __radd__ = __add__

    def __neg__(self) -> "TrigPoly":
        return TrigPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Union["TrigPoly", complex, float]) -> "TrigPoly":
        return self + (-_as_trigpoly(other))

    def __rsub__(self, other: Union["TrigPoly", complex, float]) -> "TrigPoly":
        return _as_trigpoly(other) - self

    def __mul__(self, other: Union["TrigPoly", complex, float]) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            return TrigPoly(tuple(np.convolve(self.as_array(), other.as_array())))
        return TrigPoly(tuple(np.asarray(self.coeffs) * complex(other)))

    __rmul__ = __mul__

    def conjugate_reflect(self) -> "TrigPoly":
        """The series with coefficients conj(c_{-k}); equals conj(p(x)) for real x."""
        return TrigPoly(tuple(np.conj(self.as_array()[::-1])))

    def shift(self, beta: float) -> "TrigPoly":
        """x -> p(x + beta)."""
        phases = np.exp(1j * TWO_PI * np.arange(-self.degree, self.degree + 1) * beta)
        return TrigPoly(tuple(self.as_array() * phases))


def _as_trigpoly(value: Union[TrigPoly, complex, float]) -> TrigPoly:
    return value if isinstance(value, TrigPoly) else TrigPoly.constant(value)


def strip_point(z: ComplexLike) -> np.ndarray:
    """exp(2 pi i z) with the real part reduced mod 1, so periodicity is exact."""
    z = np.asarray(z, dtype=complex)
    x = np.mod(z.real, 1.0)
    return np.exp(1j * TWO_PI * x) * np.exp(-TWO_PI * z.imag)


def evaluate(p: TrigPoly, z: ComplexLike) -> ComplexLike:
    """
    Evaluate a trigonometric polynomial at points of the complex strip.

    Args:
        p: Polynomial to evaluate
        z: Scalar or array of points x + i*eps

    Returns:
        sum_k c_k exp(2 pi i k z), same shape as ``z``

    Example:
        >>> evaluate(TrigPoly.cosine(), 0.0)
        (2+0j)
    """
    return p.evaluate_on_circle(strip_point(z))


# ============================================================================
# ROOTS ON THE CYLINDER
# ============================================================================


@dataclass(frozen=True)
class CylinderRoot:
    """A root w_j = exp(2 pi i (x_j + i eps_j)) of q(w) with its multiplicity."""

    x: float
    eps: float
    multiplicity: int
    w: complex


@dataclass(frozen=True)
class RootList:
    roots: Tuple[CylinderRoot, ...]
    zeros_at_origin: int
    leading: complex
    shift: int

    @property
    def count(self) -> int:
        """Roots counted with multiplicity, including the order at w = 0."""
        return self.zeros_at_origin + sum(r.multiplicity for r in self.roots)

    @property
    def algebraic_degree(self) -> int:
        return self.count

    def heights(self) -> List[float]:
        return sorted({r.eps for r in self.roots})

    def reconstruct(self) -> np.ndarray:
        """Coefficients (lowest power first) of leading * w^m * prod (w - w_j)^{n_j}."""
        coeffs = np.array([self.leading], dtype=complex)
        for root in self.roots:
            for _ in range(root.multiplicity):
                coeffs = P.polymul(coeffs, np.array([-root.w, 1.0], dtype=complex))
        return np.concatenate([np.zeros(self.zeros_at_origin, dtype=complex), coeffs])


def _to_cylinder(w: complex) -> Tuple[float, float]:
    x = (cmath.phase(w) / TWO_PI) % 1.0
    eps = -np.log(abs(w)) / TWO_PI
    return float(x), float(eps)


def _polish(coeffs: np.ndarray, root: complex) -> complex:
    deriv = P.polyder(coeffs)
    for _ in range(NEWTON_STEPS):
        slope = P.polyval(root, deriv)
        if slope == 0:
            break
        step = P.polyval(root, coeffs) / slope
        root = root - step
        if abs(step) <= 1e-16 * max(1.0, abs(root)):
            break
    return complex(root)


def _cluster(raw: Sequence[complex], tol: float) -> List[Tuple[complex, int]]:
    clusters: List[List[complex]] = []
    for r in sorted(raw, key=lambda v: (v.real, v.imag)):
        for members in clusters:
            centre = np.mean(members)
            if abs(r - centre) <= tol * max(1.0, abs(centre)):
                members.append(r)
                break
        else:
            clusters.append([r])
    return [(complex(np.mean(members)), len(members)) for members in clusters]


def roots_on_cylinder(p: TrigPoly, cluster_tol: Optional[float] = None) -> RootList:
    """
    Locate the roots of p on the cylinder via its algebraic polynomial.

    Args:
        p: Polynomial, not identically zero
        cluster_tol: Relative w-space distance under which raw roots merge
            into one root of higher multiplicity (default ROOT_CLUSTER_TOL)

    Returns:
        RootList with cylinder coordinates (x_j mod 1, eps_j), multiplicities,
        the order of vanishing at w = 0 and the leading coefficient of q

    Raises:
        IdenticallyZero: if every coefficient vanishes
    """
    if p.is_zero():
        raise IdenticallyZero()
    tol = settings.ROOT_CLUSTER_TOL if cluster_tol is None else cluster_tol

    coeffs = p.algebraic_coefficients()
    scale = np.max(np.abs(coeffs))
    significant = np.flatnonzero(np.abs(coeffs) > COEFF_ZERO_RTOL * scale)
    low, high = int(significant[0]), int(significant[-1])
    core = coeffs[low:high + 1]

    found: List[CylinderRoot] = []
    if len(core) > 1:
        raw = P.polyroots(core)
        for w, multiplicity in _cluster(list(raw), tol):
            if multiplicity == 1:
                w = _polish(core, w)
            else:
                logger.debug(f"clustered {multiplicity} raw roots near w={w:.6g}")
            x, eps = _to_cylinder(w)
            found.append(CylinderRoot(x=x, eps=eps, multiplicity=multiplicity, w=w))

            magnitude = np.sum(np.abs(core) * np.abs(w) ** np.arange(len(core)))
            residual = abs(P.polyval(w, core)) / magnitude
            if multiplicity == 1 and residual > 1e-9:
                logger.warning(f"root w={w:.6g} reconstructs with relative residual {residual:.2e}")

    found.sort(key=lambda r: (r.eps, r.x))
    return RootList(
        roots=tuple(found),
        zeros_at_origin=low,
        leading=complex(coeffs[high]),
        shift=p.degree,
    )


# ============================================================================
# 2x2 COMPLEX MATRICES
# ============================================================================


@dataclass(frozen=True)
class Mat2C:
    a11: complex
    a12: complex
    a21: complex
    a22: complex

    def __post_init__(self):
        for name in ("a11", "a12", "a21", "a22"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def identity(cls) -> "Mat2C":
        return cls(1, 0, 0, 1)

    @classmethod
    def diag(cls, a: complex, b: complex) -> "Mat2C":
        return cls(a, 0, 0, b)

    @classmethod
    def from_array(cls, arr: Any) -> "Mat2C":
        arr = np.asarray(arr, dtype=complex)
        if arr.shape != (2, 2):
            raise ValueError(f"expected a 2x2 array, got shape {arr.shape}")
        return cls(arr[0, 0], arr[0, 1], arr[1, 0], arr[1, 1])

    def to_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=complex)

    def __matmul__(self, other: "Mat2C") -> "Mat2C":
        return Mat2C(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def scale(self, factor: complex) -> "Mat2C":
        return Mat2C(self.a11 * factor, self.a12 * factor, self.a21 * factor, self.a22 * factor)

    def det(self) -> complex:
        return self.a11 * self.a22 - self.a12 * self.a21

    def trace(self) -> complex:
        return self.a11 + self.a22

    def norm(self) -> float:
        """Hilbert-Schmidt norm."""
        return float(np.sqrt(sum(abs(a) ** 2 for a in (self.a11, self.a12, self.a21, self.a22))))

    def inverse(self) -> "Mat2C":
        d = self.det()
        if d == 0:
            raise ZeroDivisionError("matrix is singular")
        return Mat2C(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d)

    def apply(self, v: Sequence[complex]) -> np.ndarray:
        return self.to_array() @ np.asarray(v, dtype=complex)

    def eigenvalues(self) -> Tuple[complex, complex]:
        """Both eigenvalues, larger modulus first."""
        tr = self.trace()
        disc = cmath.sqrt((self.a11 - self.a22) ** 2 + 4 * self.a12 * self.a21)
        plus, minus = tr + disc, tr - disc
        big = (plus if abs(plus) >= abs(minus) else minus) / 2
        small = self.det() / big if big != 0 else 0j
        return big, small

    def singular_values(self) -> Tuple[float, float]:
        s = np.linalg.svd(self.to_array(), compute_uv=False)
        return float(s[0]), float(s[1])


def spectral_radius(m: Mat2C) -> float:
    """
    Largest eigenvalue modulus of a 2x2 matrix.

    Uses the quadratic formula with discriminant (a11 - a22)^2 + 4 a12 a21,
    which is exact for diagonal and triangular input, and picks the branch
    without cancellation.
    """
    return abs(m.eigenvalues()[0])


def spectral_radius_batch(arr: np.ndarray) -> np.ndarray:
    """Vectorized ``spectral_radius`` over an array of shape (..., 2, 2)."""
    a, b = arr[..., 0, 0], arr[..., 0, 1]
    c, d = arr[..., 1, 0], arr[..., 1, 1]
    disc = np.sqrt((a - d) ** 2 + 4 * b * c + 0j)
    plus, minus = a + d + disc, a + d - disc
    return np.maximum(np.abs(plus), np.abs(minus)) / 2


def hs_norm_batch(arr: np.ndarray) -> np.ndarray:
    """Hilbert-Schmidt norms over an array of shape (..., 2, 2)."""
    return np.sqrt(np.sum(np.abs(arr) ** 2, axis=(-2, -1)))
