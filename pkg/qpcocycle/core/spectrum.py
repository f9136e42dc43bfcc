"""
Numerical approximations of the spectrum of the Harper operator.

Two independent methods:

- Finite sections: eigenvalues of (2N+1)x(2N+1) Hermitian truncations with
  zero boundary conditions, united over a phase grid. Off-diagonals are
  gauged to |c| so ``scipy.linalg.eigh_tridiagonal`` applies directly.
- Floquet bands: for beta = p/q the operator is q-periodic; band edges are
  the eigenvalues of the periodic and antiperiodic q x q Bloch matrices.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh

from qpcocycle.config import settings
from qpcocycle.core.coupling import Coupling
from qpcocycle.core.frequency import Frequency
from qpcocycle.core.harper import harper_c
from qpcocycle.core.trigcore import TWO_PI
from qpcocycle.exceptions import EmptySet, InputError, InvalidFrequency, SingularGauge
from qpcocycle.utils.logging_config import get_logger
from qpcocycle.utils.parallel import ordered_map

logger = get_logger(__name__)

GAUGE_TOL = 1e-8
PHASE_NUDGE = 1e-6
MAX_NUDGES = 10

# Eigenvectors with more than EDGE_WEIGHT of their mass in the outer
# EDGE_FRACTION of sites on either end are boundary states.
EDGE_FRACTION = 0.1
EDGE_WEIGHT = 0.5

BAND_SPACING = 5e-3
BAND_SAMPLES = 9


@dataclass(frozen=True, eq=False)
class SpectrumApprox:
    points: np.ndarray
    merged_intervals: Tuple[Tuple[float, float], ...]
    method: str
    params: Dict[str, Any] = field(default_factory=dict)
    skipped_phases: int = 0

    def __post_init__(self):
        points = np.sort(np.asarray(self.points, dtype=float))
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return len(self.points)


def hamiltonian_bound(coupling: Coupling) -> float:
    """||H|| <= 2 + 2(l1 + l2 + l3)."""
    l1, l2, l3 = coupling.as_floats()
    return 2.0 + 2.0 * (l1 + l2 + l3)


def merge_intervals(points: Sequence[float], tol: Optional[float] = None) -> Tuple[Tuple[float, float], ...]:
    """
    Merge sorted points into intervals, splitting at gaps larger than ``tol``.

    The default tolerance is twice the median positive spacing.
    """
    pts = np.sort(np.asarray(points, dtype=float))
    if len(pts) == 0:
        return ()
    gaps = np.diff(pts)
    if tol is None:
        positive = gaps[gaps > 0]
        tol = 2.0 * float(np.median(positive)) if len(positive) else 0.0
    breaks = np.flatnonzero(gaps > tol)
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [len(pts) - 1]])
    return tuple((float(pts[s]), float(pts[e])) for s, e in zip(starts, ends))


def measure(spectrum: SpectrumApprox) -> float:
    """Total length of the merged intervals."""
    return float(sum(hi - lo for lo, hi in spectrum.merged_intervals))


def _build(points: np.ndarray, method: str, params: Dict[str, Any], skipped: int = 0) -> SpectrumApprox:
    return SpectrumApprox(
        points=points,
        merged_intervals=merge_intervals(points),
        method=method,
        params=params,
        skipped_phases=skipped,
    )


# ============================================================================
# FINITE SECTIONS
# ============================================================================


def _section_eigenvalues(task: Tuple[Coupling, float, float, int, bool]) -> np.ndarray:
    coupling, beta, theta, half_width, edge_filter = task
    c = harper_c(coupling, beta)
    sites = np.arange(-half_width, half_width + 1)
    for _ in range(MAX_NUDGES):
        x = theta + beta * sites
        hopping = np.abs(c(x[:-1]))
        if hopping.min() >= GAUGE_TOL:
            break
        theta += PHASE_NUDGE
    diagonal = 2.0 * np.cos(TWO_PI * x)

    if not edge_filter:
        return eigh_tridiagonal(diagonal, hopping, eigvals_only=True)
    values, vectors = eigh_tridiagonal(diagonal, hopping)
    rim = max(1, int(EDGE_FRACTION * len(sites)))
    weight = np.maximum(np.sum(vectors[:rim] ** 2, axis=0), np.sum(vectors[-rim:] ** 2, axis=0))
    return values[weight <= EDGE_WEIGHT]


def truncation_phases(freq: Frequency, samples: int) -> np.ndarray:
    """Phase grid; at beta = p/q the spectrum is 1/q-periodic in theta, so [0, 1/q) suffices."""
    period = 1.0 / freq.q if freq.is_rational else 1.0
    return np.arange(samples) * period / samples


def spectrum_truncation(
    coupling: Coupling,
    freq: Frequency,
    theta_samples: Optional[int] = None,
    N: Optional[int] = None,
    edge_filter: bool = True,
    threads: int = 1,
) -> SpectrumApprox:
    """
    Union over a phase grid of eigenvalues of Hermitian finite sections.

    Args:
        coupling: Admissible coupling
        freq: Rotation frequency
        theta_samples: Phase grid size (default TRUNCATION_PHASES)
        N: Section half-width; the matrix is (2N+1) x (2N+1), N >= 50
        edge_filter: Drop eigenvalues whose eigenvectors sit at the boundary
        threads: Worker count over phases

    Returns:
        SpectrumApprox with method "truncation"
    """
    theta_samples = theta_samples or settings.TRUNCATION_PHASES
    N = N or settings.TRUNCATION_SIZE
    if N < 50:
        raise InputError(f"truncation half-width N must be >= 50, got {N}")
    phases = truncation_phases(freq, theta_samples)
    tasks = [(coupling, freq.value, float(theta), N, edge_filter) for theta in phases]
    blocks = ordered_map(_section_eigenvalues, tasks, threads)
    points = np.concatenate(blocks)
    logger.info(f"truncation N={N}, {theta_samples} phases: {len(points)} eigenvalues for {coupling}")
    return _build(
        points,
        "truncation",
        {"N": N, "theta_samples": theta_samples, "beta": freq.label, "edge_filter": edge_filter},
    )


# ============================================================================
# FLOQUET BANDS
# ============================================================================


def _periodic_data(coupling: Coupling, p: int, q: int, theta: float) -> Tuple[np.ndarray, np.ndarray]:
    beta = p / q
    x = theta + beta * np.arange(q)
    hopping = np.abs(harper_c(coupling, beta)(x))
    return hopping, 2.0 * np.cos(TWO_PI * x)


def band_edges(hopping: np.ndarray, diagonal: np.ndarray) -> List[Tuple[float, float]]:
    """Bands of the q-periodic Jacobi matrix with positive hopping, from Bloch phases 0 and pi."""
    q = len(diagonal)
    if q == 1:
        return [(diagonal[0] - 2 * hopping[0], diagonal[0] + 2 * hopping[0])]
    edges = []
    for phase in (1.0, -1.0):
        bloch = np.diag(diagonal) + np.diag(hopping[:-1], 1) + np.diag(hopping[:-1], -1)
        bloch[q - 1, 0] += phase * hopping[q - 1]
        bloch[0, q - 1] += phase * hopping[q - 1]
        edges.extend(eigvalsh(bloch))
    edges = np.sort(edges)
    return [(float(edges[2 * j]), float(edges[2 * j + 1])) for j in range(q)]


def discriminant(coupling: Coupling, p: int, q: int, theta: float, energy: float) -> float:
    """
    Trace of the normalized q-step transfer matrix; |disc| <= 2 on the bands.

    Steps are T_n = ((E - b_n)/a_n, -a_{n-1}/a_n; 1, 0) with a_{-1} = a_{q-1}.
    """
    hopping, diagonal = _periodic_data(coupling, p, q, theta)
    product = np.eye(2)
    for n in range(q):
        step = np.array([[(energy - diagonal[n]) / hopping[n], -hopping[n - 1] / hopping[n]], [1.0, 0.0]])
        product = step @ product
    return float(np.trace(product))


def _floquet_phase(task: Tuple[Coupling, int, int, float, int]) -> Optional[np.ndarray]:
    coupling, p, q, theta, band_samples = task
    hopping, diagonal = _periodic_data(coupling, p, q, theta)
    if hopping.min() < GAUGE_TOL:
        return None
    samples = []
    for lo, hi in band_edges(hopping, diagonal):
        count = max(band_samples, int(math.ceil((hi - lo) / BAND_SPACING)) + 1)
        samples.append(np.linspace(lo, hi, count))
    return np.concatenate(samples)


def spectrum_floquet(
    coupling: Coupling,
    p: int,
    q: int,
    theta_samples: Optional[int] = None,
    band_samples: int = BAND_SAMPLES,
    threads: int = 1,
) -> SpectrumApprox:
    """
    Union over theta in [0, 1/q) of the Floquet bands at beta = p/q.

    Phases where min_n |c(theta + n beta)| < 1e-8 are skipped and counted.

    Raises:
        InvalidFrequency: if gcd(p, q) != 1
        SingularGauge: if every phase is skipped
    """
    if q < 1 or math.gcd(p, q) != 1:
        raise InvalidFrequency(f"p/q = {p}/{q} must be in lowest terms")
    theta_samples = theta_samples or settings.FLOQUET_PHASES
    phases = np.arange(theta_samples) / (q * theta_samples)
    blocks = ordered_map(_floquet_phase, [(coupling, p, q, float(t), band_samples) for t in phases], threads)
    kept = [b for b in blocks if b is not None]
    skipped = len(blocks) - len(kept)
    if not kept:
        raise SingularGauge()
    if skipped:
        logger.warning(f"floquet {p}/{q}: skipped {skipped} of {theta_samples} phases with |c| < {GAUGE_TOL:g}")
    return _build(
        np.concatenate(kept),
        "floquet",
        {"p": p, "q": q, "theta_samples": theta_samples},
        skipped,
    )


# ============================================================================
# COMPARISON AND SAMPLING
# ============================================================================


def _as_points(value: Union[SpectrumApprox, Sequence[float]]) -> np.ndarray:
    points = value.points if isinstance(value, SpectrumApprox) else np.asarray(value, dtype=float)
    if len(points) == 0:
        raise EmptySet()
    return np.sort(points)


def _directed(a: np.ndarray, b: np.ndarray) -> float:
    idx = np.clip(np.searchsorted(b, a), 1, len(b) - 1) if len(b) > 1 else np.zeros(len(a), dtype=int)
    nearest = np.minimum(np.abs(a - b[idx]), np.abs(a - b[idx - 1])) if len(b) > 1 else np.abs(a - b[0])
    return float(np.max(nearest))


def hausdorff(a: Union[SpectrumApprox, Sequence[float]], b: Union[SpectrumApprox, Sequence[float]]) -> float:
    """
    Symmetric Hausdorff distance between two point sets.

    Example:
        >>> hausdorff([0.0], [1.0])
        1.0
    """
    pa, pb = _as_points(a), _as_points(b)
    return max(_directed(pa, pb), _directed(pb, pa))


def mid_band_energies(spectrum: SpectrumApprox, count: Optional[int] = None) -> List[float]:
    """
    Energies well inside the approximate spectrum.

    Picks are spread over the merged intervals holding the most points,
    round-robin by size; within an interval with k picks the (i+1)/(k+1)
    quantiles of its points are used, so every energy is a computed point.
    """
    count = count or settings.MID_BAND_COUNT
    points = spectrum.points
    groups = []
    for lo, hi in spectrum.merged_intervals:
        inside = points[(points >= lo) & (points <= hi)]
        if len(inside):
            groups.append(inside)
    if not groups:
        raise EmptySet()
    groups.sort(key=len, reverse=True)

    picks = [0] * len(groups)
    for i in range(count):
        picks[i % len(groups)] += 1
    energies = []
    for inside, k in zip(groups, picks):
        for i in range(k):
            energies.append(float(inside[int((i + 1) * (len(inside) - 1) / (k + 1))]))
    return sorted(energies)
