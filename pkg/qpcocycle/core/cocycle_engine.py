"""
Cocycles over a circle rotation and their Lyapunov exponents.

A cocycle (beta, D) acts by (x, v) -> (x + beta, D(x) v) where D is a 2x2
matrix of trigonometric polynomials, optionally divided pointwise by a
scalar trigonometric polynomial (the normalized Jacobi cocycle A/c).
Complexification replaces x by x + i*eps.

Estimators:
- ``le_iterative``: (1/n) log ||D^(n)(x + i eps)|| averaged over a phase
  grid, with the running product renormalized to unit Hilbert-Schmidt norm
  every step and the logs summed.
- ``le_rational``: for beta = p/q, (1/q) * integral of log rho(D^(q)), by
  Gauss-Legendre quadrature over one period [0, 1/q).

``epsilon_sweep`` samples eps -> L(beta, D_eps) and fits sliding-window
slopes; ``acceleration_at`` reads the right-sided slope in 2*pi units.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from qpcocycle.config import settings
from qpcocycle.core.frequency import Frequency
from qpcocycle.core.jensen import i_eps_exact
from qpcocycle.core.trigcore import (
    TWO_PI,
    Mat2C,
    TrigPoly,
    hs_norm_batch,
    roots_on_cylinder,
    spectral_radius_batch,
    strip_point,
)
from qpcocycle.exceptions import AtKink, IdenticallyZero, InputError, NotRational, SingularInverse, ZeroCocycle
from qpcocycle.utils.logging_config import get_logger
from qpcocycle.utils.parallel import ordered_map

logger = get_logger(__name__)

# Phase grid (j + PHASE_OFFSET)/m keeps samples off symmetric points such as 0 and 1/2.
PHASE_OFFSET = 0.309

BACKWARD_DET_TOL = 1e-12

Backend = str  # "iterative" | "rational"


# ============================================================================
# COCYCLES
# ============================================================================


@dataclass(frozen=True)
class Cocycle:
    """
    Frequency plus a 2x2 matrix of trigonometric polynomials (row-major).

    ``divisor`` (if set) divides every entry pointwise; it is never folded
    into the polynomials, so its zeros stay visible as poles.
    """

    freq: Frequency
    entries: Tuple[TrigPoly, TrigPoly, TrigPoly, TrigPoly]
    divisor: Optional[TrigPoly] = None
    label: str = "custom"

    @classmethod
    def from_matrix(
        cls,
        freq: Frequency,
        matrix: Sequence[Sequence[Union[TrigPoly, complex, float]]],
        divisor: Optional[TrigPoly] = None,
        label: str = "custom",
    ) -> "Cocycle":
        (a, b), (c, d) = matrix
        entries = tuple(e if isinstance(e, TrigPoly) else TrigPoly.constant(e) for e in (a, b, c, d))
        return cls(freq=freq, entries=entries, divisor=divisor, label=label)

    @classmethod
    def constant(cls, freq: Frequency, m: Union[Mat2C, Any], label: str = "constant") -> "Cocycle":
        m = m if isinstance(m, Mat2C) else Mat2C.from_array(m)
        return cls.from_matrix(freq, [[m.a11, m.a12], [m.a21, m.a22]], label=label)

    @classmethod
    def from_json(cls, payload: Mapping[str, Any], freq: Frequency) -> "Cocycle":
        """
        Build from ``{"matrix": [[e11, e12], [e21, e22]], "divisor": e, "label": str}``.

        Each entry is a number, a ``[re, im]`` pair, or a TrigPoly object
        ``{"coeffs": [[k, re, im], ...]}``.
        """

        def entry(value: Any) -> TrigPoly:
            if isinstance(value, Mapping):
                return TrigPoly.from_json(value)
            if isinstance(value, (list, tuple)):
                re_part, im_part = value
                return TrigPoly.constant(complex(float(re_part), float(im_part)))
            return TrigPoly.constant(complex(value))

        try:
            rows = payload["matrix"]
            if len(rows) != 2 or any(len(row) != 2 for row in rows):
                raise ValueError("matrix must be 2x2")
            matrix = [[entry(v) for v in row] for row in rows]
            divisor = entry(payload["divisor"]) if payload.get("divisor") is not None else None
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"invalid cocycle description: {exc}") from exc
        return cls.from_matrix(freq, matrix, divisor=divisor, label=str(payload.get("label", "custom")))

    def with_frequency(self, freq: Frequency) -> "Cocycle":
        return Cocycle(freq=freq, entries=self.entries, divisor=self.divisor, label=self.label)

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def matrix_at(self, z: Union[complex, np.ndarray]) -> np.ndarray:
        """D(z) for an array of strip points, shape z.shape + (2, 2)."""
        w = strip_point(z)
        out = np.empty(w.shape + (2, 2), dtype=complex)
        for idx, poly in enumerate(self.entries):
            out[..., idx // 2, idx % 2] = poly.evaluate_on_circle(w)
        if self.divisor is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                out /= np.asarray(self.divisor.evaluate_on_circle(w))[..., None, None]
        return out

    def at(self, z: complex) -> Mat2C:
        return Mat2C.from_array(self.matrix_at(complex(z)))

    def det_poly(self) -> TrigPoly:
        """Determinant of the polynomial matrix (before any divisor)."""
        a, b, c, d = self.entries
        return a * d - b * c

    def is_singular(self, tol: Optional[float] = None) -> bool:
        """True when det vanishes somewhere on the real line (root with |eps_j| <= tol)."""
        tol = settings.SINGULAR_TOL if tol is None else tol
        det = self.det_poly()
        try:
            roots = roots_on_cylinder(det)
        except IdenticallyZero:
            return True
        return any(abs(r.eps) <= tol for r in roots.roots)


# ============================================================================
# TRANSFER PRODUCTS
# ============================================================================


def transfer_product(cocycle: Cocycle, x: float, n: int, eps: float = 0.0) -> Mat2C:
    """
    n-step transfer matrix D(x + (n-1)beta + i eps) ... D(x + i eps).

    Newer factors multiply on the left. The product is not renormalized.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    beta = cocycle.freq.value
    phases = x + beta * np.arange(n) + 1j * eps
    steps = cocycle.matrix_at(phases)
    product = np.eye(2, dtype=complex)
    for step in steps:
        product = step @ product
    return Mat2C.from_array(product)


def _phase_grid(samples: int) -> np.ndarray:
    return (np.arange(samples) + PHASE_OFFSET) / samples


def _checkpoints(n: int) -> List[int]:
    points = [2**k for k in range(int(math.log2(n)) + 1) if 2**k <= n]
    if points[-1] != n:
        points.append(n)
    return points


def _log_growth(
    cocycle: Cocycle,
    x0: np.ndarray,
    eps: np.ndarray,
    n: int,
    checkpoints: Sequence[int],
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Average log-norm growth along each (x0, eps) orbit.

    Returns:
        (rates, flagged): rates has shape (batch, len(checkpoints)) holding
        (1/k) log ||D^(k)|| at each checkpoint k; flagged marks orbits where a
        norm vanished or overflowed.
    """
    batch = x0.shape[0]
    beta = cocycle.freq.value
    floor = settings.NORM_FLOOR
    product = np.tile(np.eye(2, dtype=complex), (batch, 1, 1))
    log_sum = np.zeros(batch)
    flagged = np.zeros(batch, dtype=bool)
    rates = np.empty((batch, len(checkpoints)))
    slot = {k: i for i, k in enumerate(checkpoints)}

    for k in range(n):
        step = cocycle.matrix_at(x0 + k * beta + 1j * eps)
        product = step @ product
        norms = hs_norm_batch(product)
        bad = ~np.isfinite(norms) | (norms < floor)
        if bad.any():
            flagged |= bad
            product[bad] = np.eye(2)
            norms = np.where(bad, 1.0, norms)
        product /= norms[:, None, None]
        log_sum += np.log(norms)
        if k + 1 in slot:
            rates[:, slot[k + 1]] = log_sum / (k + 1)
    return rates, flagged


@dataclass(frozen=True)
class LEEstimate:
    """
    Result of ``le_iterative``.

    Unpacks as ``(estimate, upper_sequence)``; ``upper_sequence`` lists
    (n_k, L_{n_k}) along the doubling checkpoints.
    """

    estimate: float
    upper_sequence: Tuple[Tuple[int, float], ...]
    eps: float
    n: int
    phase_samples: int
    flagged: int
    noise_floor: float
    phase_values: Tuple[float, ...] = field(repr=False, default=())

    def __iter__(self) -> Iterator[Any]:
        yield self.estimate
        yield list(self.upper_sequence)


def _summarize(
    rates: np.ndarray, flagged: np.ndarray, checkpoints: Sequence[int], eps: float, n: int
) -> LEEstimate:
    good = ~flagged
    samples = int(rates.shape[0])
    if not good.any():
        logger.warning(f"all {samples} phase samples flagged at eps={eps:g}; Lyapunov exponent is -inf")
        return LEEstimate(
            estimate=float("-inf"),
            upper_sequence=tuple((k, float("-inf")) for k in checkpoints),
            eps=float(eps),
            n=n,
            phase_samples=samples,
            flagged=samples,
            noise_floor=float("inf"),
        )
    kept = rates[good]
    per_phase = kept[:, -1]
    spread = float(np.std(per_phase) / math.sqrt(len(per_phase))) if len(per_phase) > 1 else 0.0
    sequence = tuple((k, float(np.mean(kept[:, i]))) for i, k in enumerate(checkpoints))
    n_flagged = int(flagged.sum())
    if n_flagged:
        logger.warning(f"{n_flagged} of {samples} phase samples flagged at eps={eps:g} and excluded")
    return LEEstimate(
        estimate=float(np.mean(per_phase)),
        upper_sequence=sequence,
        eps=float(eps),
        n=n,
        phase_samples=samples,
        flagged=n_flagged,
        noise_floor=spread + 1.0 / n,
        phase_values=tuple(float(v) for v in per_phase),
    )


def le_iterative_many(
    cocycle: Cocycle,
    eps_values: Sequence[float],
    n: Optional[int] = None,
    phase_samples: Optional[int] = None,
) -> List[LEEstimate]:
    """``le_iterative`` for several eps values, sharing one batched product loop."""
    n = n or settings.LE_STEPS
    phase_samples = phase_samples or settings.PHASE_SAMPLES
    if n < 1 or phase_samples < 1:
        raise InputError(f"need n >= 1 and phase_samples >= 1, got n={n}, phase_samples={phase_samples}")
    if cocycle.is_zero():
        raise ZeroCocycle()

    eps_values = np.asarray(list(eps_values), dtype=float)
    phases = _phase_grid(phase_samples)
    x0 = np.tile(phases, len(eps_values))
    eps = np.repeat(eps_values, phase_samples)
    checkpoints = _checkpoints(n)
    rates, flagged = _log_growth(cocycle, x0, eps, n, checkpoints)

    results = []
    for i, value in enumerate(eps_values):
        block = slice(i * phase_samples, (i + 1) * phase_samples)
        results.append(_summarize(rates[block], flagged[block], checkpoints, value, n))
    return results


def le_iterative(
    cocycle: Cocycle,
    eps: float = 0.0,
    n: Optional[int] = None,
    phase_samples: Optional[int] = None,
) -> LEEstimate:
    """
    Finite-n Lyapunov exponent estimate averaged over a phase grid.

    Args:
        cocycle: Cocycle, not identically zero
        eps: Imaginary shift of the phase
        n: Product length (default settings.LE_STEPS)
        phase_samples: Number of starting phases (default settings.PHASE_SAMPLES)

    Returns:
        LEEstimate; unpacks as (estimate, upper_sequence)

    Raises:
        ZeroCocycle: if the matrix is identically zero

    Example:
        >>> freq = Frequency.golden()
        >>> est, seq = le_iterative(Cocycle.constant(freq, Mat2C.diag(2, 1)), n=64)
        >>> round(est, 6)
        0.693147
    """
    return le_iterative_many(cocycle, [eps], n, phase_samples)[0]


def _gauss_legendre(a: float, b: float, points: int, order: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights with at least ``points`` nodes on [a, b]."""
    order = order or settings.QUAD_ORDER
    order = min(order, points)
    panels = max(1, math.ceil(points / order))
    base_x, base_w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    nodes = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    weights = (half[:, None] * base_w[None, :]).ravel()
    return nodes, weights


def le_rational(cocycle: Cocycle, eps: float = 0.0, quad_points: Optional[int] = None) -> float:
    """
    Exact-rational Lyapunov exponent (1/q) * int_T log rho(D^(q)(x + i eps)) dx.

    The integrand is 1/q-periodic, so the integral is taken over [0, 1/q)
    with composite Gauss-Legendre nodes (never at the panel endpoints).
    Spectral radii that vanish are floored at NORM_FLOOR and logged.

    Args:
        cocycle: Cocycle with a rational frequency p/q
        eps: Imaginary shift
        quad_points: Total node budget over [0, 1); must be >= q (default 64q)

    Raises:
        NotRational: if the frequency is irrational
    """
    freq = cocycle.freq
    if not freq.is_rational:
        raise NotRational()
    if cocycle.is_zero():
        raise ZeroCocycle()
    q = freq.q
    quad_points = quad_points or 64 * q
    if quad_points < q:
        raise InputError(f"quad_points must be >= q={q}, got {quad_points}")

    nodes, weights = _gauss_legendre(0.0, 1.0 / q, math.ceil(quad_points / q))
    product = np.tile(np.eye(2, dtype=complex), (len(nodes), 1, 1))
    log_scale = np.zeros(len(nodes))
    for k in range(q):
        step = cocycle.matrix_at(nodes + k * freq.value + 1j * eps)
        product = step @ product
        norms = hs_norm_batch(product)
        norms = np.where(np.isfinite(norms) & (norms > 0), norms, 1.0)
        product /= norms[:, None, None]
        log_scale += np.log(norms)

    radius = spectral_radius_batch(product)
    dead = ~(radius > settings.NORM_FLOOR)
    if dead.any():
        logger.warning(f"{int(dead.sum())} quadrature nodes with vanishing spectral radius at eps={eps:g}")
    integrand = np.log(np.maximum(radius, settings.NORM_FLOOR)) + log_scale
    return float(np.sum(weights * integrand))


# ============================================================================
# EPSILON SWEEPS AND ACCELERATION
# ============================================================================


@dataclass(frozen=True)
class LEProfile:
    """
    Sampled eps -> L(beta, D_eps) with sliding-window slopes.

    ``slopes[i]`` is the least-squares slope (in 2*pi units) over grid
    points ``window_start[i] .. window_start[i] + window - 1``.
    """

    eps_grid: Tuple[float, ...]
    le_values: Tuple[float, ...]
    slopes: Tuple[float, ...]
    slope_centers: Tuple[float, ...]
    window_start: Tuple[int, ...]
    window: int
    kinks: Tuple[float, ...]
    noise_floor: float
    flagged: int
    backend: str

    @property
    def step(self) -> float:
        return (self.eps_grid[-1] - self.eps_grid[0]) / (len(self.eps_grid) - 1)

    def second_differences(self) -> np.ndarray:
        return np.diff(np.asarray(self.le_values), n=2)

    def convexity_tolerance(self) -> float:
        return 3.0 * self.noise_floor

    def is_convex(self, tol: Optional[float] = None) -> bool:
        tol = self.convexity_tolerance() if tol is None else tol
        return bool(np.all(self.second_differences() >= -tol))

    def rows(self) -> List[Dict[str, Any]]:
        """One record per grid point: eps, L and the slope of the window starting there."""
        slope_by_start = dict(zip(self.window_start, self.slopes))
        kink_marks = set()
        for kink in self.kinks:
            kink_marks.add(int(np.argmin(np.abs(np.asarray(self.eps_grid) - kink))))
        return [
            {
                "eps": eps,
                "le": le,
                "omega": slope_by_start.get(i),
                "kink": i in kink_marks,
            }
            for i, (eps, le) in enumerate(zip(self.eps_grid, self.le_values))
        ]


def _window_fit(eps: np.ndarray, values: np.ndarray) -> Tuple[float, float]:
    slope, intercept = np.polyfit(eps, values, 1)
    return float(slope), float(intercept)


def _detect_kinks(grid: np.ndarray, values: np.ndarray, slopes: List[float], window: int, tol: float) -> List[float]:
    """
    Group consecutive windows whose slopes jump by more than ``tol``; place one
    kink per group at the curvature-weighted centre of the second differences.

    For a piecewise-linear profile with a kink between g_j and g_{j+1}, only
    the second differences centred on those two points are nonzero, and
    their weighted mean recovers the kink location exactly.
    """
    jumps = [i for i in range(len(slopes) - 1) if abs(slopes[i + 1] - slopes[i]) > tol]
    groups: List[List[int]] = []
    for i in jumps:
        if groups and i - groups[-1][-1] <= 1:
            groups[-1].append(i)
        else:
            groups.append([i])

    # dd[i] is centred on grid[i + 1]
    dd = np.diff(values, n=2)
    kinks = []
    for group in groups:
        first = max(group[0], 1)
        last = min(group[-1] + window, len(grid) - 2)
        centres = np.arange(first, last + 1)
        if not len(centres):
            continue
        j = int(centres[np.argmax(dd[centres - 1])])
        around = [i for i in (j - 1, j, j + 1) if 1 <= i <= len(grid) - 2]
        weights = np.array([max(dd[i - 1], 0.0) for i in around])
        if weights.sum() > 0:
            location = float(np.dot(weights, grid[around]) / weights.sum())
        else:
            location = float(grid[j])
        kinks.append(location)
    return kinks


def _iterative_chunk(task: Tuple[Cocycle, Tuple[float, ...], int, int]) -> List[LEEstimate]:
    cocycle, eps_values, n, phase_samples = task
    return le_iterative_many(cocycle, eps_values, n, phase_samples)


def _rational_point(task: Tuple[Cocycle, float, Optional[int]]) -> float:
    cocycle, eps, quad_points = task
    return le_rational(cocycle, eps, quad_points)


def epsilon_sweep(
    cocycle: Cocycle,
    eps_min: float,
    eps_max: float,
    steps: int,
    le_backend: Backend = "iterative",
    n: Optional[int] = None,
    phase_samples: Optional[int] = None,
    quad_points: Optional[int] = None,
    window: Optional[int] = None,
    slope_kink_tol: Optional[float] = None,
    threads: int = 1,
) -> LEProfile:
    """
    Sample L(beta, D_eps) on a uniform eps grid and fit sliding-window slopes.

    Args:
        cocycle: Cocycle to complexify
        eps_min, eps_max: Grid end points, eps_min < eps_max
        steps: Number of grid points (>= 3)
        le_backend: "iterative" or "rational"
        n, phase_samples: Iterative backend settings
        quad_points: Rational backend setting
        window: Points per least-squares window (default KINK_WINDOW)
        slope_kink_tol: Slope jump (2*pi units) that marks a kink
        threads: Worker count for the per-eps tasks

    Returns:
        LEProfile
    """
    if steps < 3:
        raise InputError(f"steps must be >= 3, got {steps}")
    if not eps_min < eps_max:
        raise InputError(f"need eps_min < eps_max, got [{eps_min}, {eps_max}]")
    window = min(window or settings.KINK_WINDOW, steps)
    tol = settings.SLOPE_KINK_TOL if slope_kink_tol is None else slope_kink_tol
    grid = np.linspace(eps_min, eps_max, steps)

    flagged = 0
    if le_backend == "iterative":
        n = n or settings.LE_STEPS
        phase_samples = phase_samples or settings.PHASE_SAMPLES
        workers = max(1, min(settings.worker_count(threads), steps))
        chunks = [tuple(float(e) for e in part) for part in np.array_split(grid, workers) if len(part)]
        estimates = [
            est
            for block in ordered_map(_iterative_chunk, [(cocycle, c, n, phase_samples) for c in chunks], threads)
            for est in block
        ]
        values = np.array([e.estimate for e in estimates])
        noise = max(e.noise_floor for e in estimates)
        flagged = sum(e.flagged for e in estimates)
    elif le_backend == "rational":
        if not cocycle.freq.is_rational:
            raise NotRational()
        values = np.array(ordered_map(_rational_point, [(cocycle, float(e), quad_points) for e in grid], threads))
        noise = 1e-9
    else:
        raise InputError(f"unknown LE backend {le_backend!r}")

    starts = list(range(steps - window + 1))
    slopes = [_window_fit(grid[s:s + window], values[s:s + window])[0] / TWO_PI for s in starts]
    centers = [float(np.mean(grid[s:s + window])) for s in starts]
    kinks = _detect_kinks(grid, values, slopes, window, tol)
    logger.info(
        f"eps sweep [{eps_min:g}, {eps_max:g}] x {steps} ({le_backend}): "
        f"{len(kinks)} kink(s), noise floor {noise:.2e}"
    )

    return LEProfile(
        eps_grid=tuple(float(e) for e in grid),
        le_values=tuple(float(v) for v in values),
        slopes=tuple(slopes),
        slope_centers=tuple(centers),
        window_start=tuple(starts),
        window=window,
        kinks=tuple(kinks),
        noise_floor=float(noise),
        flagged=int(flagged),
        backend=le_backend,
    )


class Acceleration(NamedTuple):
    omega: float
    nearest_int: int
    residual: float


def _one_sided_slope(grid: np.ndarray, values: np.ndarray, idx: Sequence[int]) -> float:
    idx = list(idx)
    if len(idx) < 2:
        return float("nan")
    slope, _ = _window_fit(grid[idx], values[idx])
    return slope / TWO_PI


def _clean_side(grid: np.ndarray, profile: LEProfile, center: float, side: str) -> List[int]:
    """Up to ``window`` grid indices on one side of ``center`` not crossing another kink."""
    window = profile.window
    if side == "right":
        idx = [i for i in range(len(grid)) if grid[i] >= center - 1e-12][:window]
        barrier = [k for k in profile.kinks if k > center + profile.step]
        if barrier:
            idx = [i for i in idx if grid[i] < min(barrier)]
    else:
        idx = [i for i in range(len(grid)) if grid[i] <= center + 1e-12][-window:]
        barrier = [k for k in profile.kinks if k < center - profile.step]
        if barrier:
            idx = [i for i in idx if grid[i] > max(barrier)]
    return idx


def acceleration_at(profile: LEProfile, eps: float) -> Acceleration:
    """
    Right-sided slope of the profile at ``eps`` in 2*pi units.

    Args:
        profile: Output of ``epsilon_sweep``
        eps: Point strictly inside the grid

    Returns:
        Acceleration(omega, nearest_int, residual)

    Raises:
        AtKink: if ``eps`` lies within one grid step of a detected kink;
            the exception carries both one-sided slopes
    """
    grid = np.asarray(profile.eps_grid)
    values = np.asarray(profile.le_values)
    if not grid[0] < eps < grid[-1]:
        raise InputError(f"eps={eps:g} is not strictly inside the profile grid [{grid[0]:g}, {grid[-1]:g}]")
    h = profile.step

    for kink in profile.kinks:
        if abs(eps - kink) <= h:
            right_idx = [i for i in _clean_side(grid, profile, kink, "right") if grid[i] > kink + h / 2]
            left_idx = [i for i in _clean_side(grid, profile, kink, "left") if grid[i] < kink - h / 2]
            raise AtKink(
                eps,
                left_slope=_one_sided_slope(grid, values, left_idx),
                right_slope=_one_sided_slope(grid, values, right_idx),
            )

    idx = _clean_side(grid, profile, eps, "right")
    if len(idx) < 2:
        idx = _clean_side(grid, profile, eps, "left")
    omega = _one_sided_slope(grid, values, idx)
    nearest = int(round(omega))
    return Acceleration(omega=omega, nearest_int=nearest, residual=abs(omega - nearest))


# ============================================================================
# SOLUTION GROWTH AND DETERMINANT SPLIT
# ============================================================================


class SolutionGrowth(NamedTuple):
    forward_rate: float
    backward_rate: float


def solution_growth(
    cocycle: Cocycle, x: float, w0: Sequence[complex], n: int, eps: float = 0.0
) -> SolutionGrowth:
    """
    Forward and backward exponential growth rates of one initial vector.

    Forward: (1/n) log ||D^(n)(x) w0||. Backward: the same with the
    inverse-matrix convention D^(-n)(x) = D^(n)(x - n beta)^(-1).

    Raises:
        SingularInverse: if a backward step meets |det| < 1e-12; the
            forward rate is attached to the exception
    """
    v0 = np.asarray(w0, dtype=complex)
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if abs(np.linalg.norm(v0) - 1.0) > 1e-12:
        raise InputError("initial vector must have unit norm")
    beta = cocycle.freq.value

    forward_steps = cocycle.matrix_at(x + beta * np.arange(n) + 1j * eps)
    v, log_sum = v0.copy(), 0.0
    for step in forward_steps:
        v = step @ v
        size = np.linalg.norm(v)
        if not size > 0:
            log_sum = float("-inf")
            break
        log_sum += math.log(size)
        v /= size
    forward = log_sum / n

    backward_steps = cocycle.matrix_at(x - beta * np.arange(1, n + 1) + 1j * eps)
    v, log_sum = v0.copy(), 0.0
    for k, step in enumerate(backward_steps, start=1):
        det = step[0, 0] * step[1, 1] - step[0, 1] * step[1, 0]
        if not abs(det) >= BACKWARD_DET_TOL:
            raise SingularInverse(step=k, forward_rate=forward)
        v = np.linalg.solve(step, v)
        size = np.linalg.norm(v)
        log_sum += math.log(size)
        v /= size
    return SolutionGrowth(forward_rate=forward, backward_rate=log_sum / n)


def determinant_half_average(cocycle: Cocycle, eps: float = 0.0) -> float:
    """
    m = (1/2) int_T log |det D(x + i eps)| dx, from exact Jensen profiles.

    Splits L(D) = L(D / sqrt(det D)) + m; for vectors in the contracting
    Oseledets direction the growth rate is -L + 2m.
    """
    det = cocycle.det_poly()
    if det.is_zero():
        return float("-inf")
    total = i_eps_exact(det).value(eps)
    if cocycle.divisor is not None:
        total -= 2.0 * i_eps_exact(cocycle.divisor).value(eps)
    return 0.5 * total


def divisor_log_average(cocycle: Cocycle, eps: float = 0.0) -> float:
    """I_eps of the divisor (0 when the cocycle has none): L(A) - L(A/c) = I_eps(c)."""
    if cocycle.divisor is None:
        return 0.0
    return i_eps_exact(cocycle.divisor).value(eps)
