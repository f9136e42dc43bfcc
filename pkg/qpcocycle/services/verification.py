"""
Verification panels.

Each panel recomputes a family of results two independent ways (numeric
exponent against closed form, quadrature against Jensen's formula, ...)
and returns one CheckRow per comparison. ``quick`` runs use smaller
products, sections and samples with tolerances widened to match.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from qpcocycle.core.cocycle_engine import (
    Cocycle,
    acceleration_at,
    determinant_half_average,
    epsilon_sweep,
    le_iterative,
    le_rational,
    solution_growth,
)
from qpcocycle.core.coupling import Coupling
from qpcocycle.core.frequency import Frequency
from qpcocycle.core.harper import (
    L_M,
    build_cocycle,
    complex_le,
    duality_le_identity_check,
    harper_c,
    m_matrix,
    thouless_le,
)
from qpcocycle.core.jensen import harper_i_eps_closed, i_eps_exact, i_eps_quadrature
from qpcocycle.core.spectrum import (
    BAND_SPACING,
    hausdorff,
    mid_band_energies,
    spectrum_floquet,
    spectrum_truncation,
)
from qpcocycle.core.trigcore import TWO_PI, Mat2C, TrigPoly, spectral_radius
from qpcocycle.exceptions import AtKink, InputError
from qpcocycle.schemas.report import FAIL, INFO, PASS, CheckRow
from qpcocycle.utils.logging_config import get_logger
from qpcocycle.utils.parallel import ordered_map

logger = get_logger(__name__)

JENSEN_SEED = 20240917
KINK_CLEARANCE = 1e-3
# Successive Hausdorff distances may grow by this fraction plus the band fill spacing.
DECREASE_SLACK = 0.1


@dataclass(frozen=True)
class PanelSizes:
    n: int
    phases: int
    N: int
    theta_samples: int
    energies: int
    samples: int
    sweep_steps: int
    q_max: int
    floquet_phases: int
    tol_scale: float


FULL = PanelSizes(
    n=10_000,
    phases=8,
    N=1000,
    theta_samples=32,
    energies=7,
    samples=100,
    sweep_steps=41,
    q_max=377,
    floquet_phases=32,
    tol_scale=1.0,
)
QUICK = PanelSizes(
    n=2_000,
    phases=4,
    N=200,
    theta_samples=8,
    energies=3,
    samples=20,
    sweep_steps=21,
    q_max=144,
    floquet_phases=8,
    tol_scale=2.5,
)

# (couplings, frequency) pairs for the spectrum-average checks
AMO = (0.0, 0.5, 0.0)
REGION_I = [(0.25, 0.25, 0.25), (0.5, 0.2, 0.2), (0.1, 0.7, 0.3)]
REGIONS_II_III = [(0.2, 2.0, 0.3), (1.0, 0.5, 0.5), (0.8, 0.5, 0.7)]
ASYMPTOTIC_EXTRA = (1.0, 0.5, 0.0)
PROFILE_COUPLING = (0.25, 0.25, 0.25)


def _label(values: Tuple[float, float, float]) -> str:
    return ",".join(f"{v:g}" for v in values)


def _mid_band(coupling: Coupling, freq: Frequency, sizes: PanelSizes, count: int, threads: Optional[int]) -> List[float]:
    spectrum = spectrum_truncation(coupling, freq, sizes.theta_samples, sizes.N, threads=threads)
    return mid_band_energies(spectrum, count)


def _le_on_spectrum(task: Tuple[Coupling, Frequency, float, int, int]) -> float:
    coupling, freq, energy, n, phases = task
    return le_iterative(build_cocycle(coupling, freq, energy, "B"), 0.0, n, phases).estimate


# ============================================================================
# PANELS
# ============================================================================


def panel_thouless(sizes: PanelSizes, threads: Optional[int] = None) -> List[CheckRow]:
    """Numeric L(B^E) at mid-band energies against the closed form, in every region."""
    tol = 0.02 * sizes.tol_scale
    cases = [(AMO, Frequency.golden()), (AMO, Frequency.rational(233, 377))]
    cases += [(values, Frequency.golden()) for values in REGION_I + REGIONS_II_III]
    rows = []
    for values, freq in cases:
        coupling = Coupling(*values)
        target = thouless_le(coupling)
        energies = _mid_band(coupling, freq, sizes, sizes.energies, threads)
        tasks = [(coupling, freq, e, sizes.n, sizes.phases) for e in energies]
        for energy, computed in zip(energies, ordered_map(_le_on_spectrum, tasks, threads)):
            rows.append(
                CheckRow.judge(
                    "thouless",
                    "L(B^E) on spectrum",
                    target,
                    computed,
                    tol,
                    detail=f"lambda={_label(values)} beta={freq.label} E={energy:.6f}",
                )
            )
    return rows


def panel_duality(sizes: PanelSizes, threads: Optional[int] = None) -> List[CheckRow]:
    """Duality identity residuals, both exponents computed numerically."""
    tol = 0.03 * sizes.tol_scale
    freq = Frequency.golden()
    rows = []
    for values in REGION_I:
        coupling = Coupling(*values)
        for energy in _mid_band(coupling, freq, sizes, 3, threads):
            check = duality_le_identity_check(coupling, freq, energy, sizes.n, sizes.phases)
            rows.append(
                CheckRow.judge(
                    "duality",
                    "L(B) - log average - L(B dual)",
                    0.0,
                    check.residual,
                    tol,
                    detail=f"lambda={_label(values)} E={energy:.6f}",
                )
            )
    return rows


def _random_trig_poly(rng: np.random.Generator) -> TrigPoly:
    degree = int(rng.integers(1, 7))
    coeffs = rng.normal(size=2 * degree + 1) + 1j * rng.normal(size=2 * degree + 1)
    return TrigPoly.from_mapping({k - degree: complex(c) for k, c in enumerate(coeffs)})


def _off_kinks(eps: float, kinks: Tuple[float, ...]) -> float:
    for _ in range(10):
        near = [k for k in kinks if abs(eps - k) < KINK_CLEARANCE]
        if not near:
            break
        eps = near[0] + 10 * KINK_CLEARANCE
    return eps


def panel_jensen(sizes: PanelSizes, threads: Optional[int] = None) -> List[CheckRow]:
    """Exact Jensen profiles against quadrature on random polynomials and a Harper coupling sweep."""
    tol = 1e-6
    rng = np.random.default_rng(JENSEN_SEED)
    poly_worst, harper_worst, closed_worst = 0.0, 0.0, 0.0
    bad_slopes = 0
    poly_detail, harper_detail = "", ""

    for i in range(sizes.samples):
        poly = _random_trig_poly(rng)
        profile = i_eps_exact(poly)
        slopes = profile.accelerations
        if not all(float(s).is_integer() for s in slopes) or any(b <= a for a, b in zip(slopes, slopes[1:])):
            bad_slopes += 1
        eps = _off_kinks(float(rng.uniform(-0.5, 0.5)), profile.kink_eps)
        residual = abs(i_eps_quadrature(poly, eps) - profile(eps))
        if residual >= poly_worst:
            poly_worst, poly_detail = residual, f"sample {i}, degree {poly.degree}, eps={eps:.4f}"

    for i in range(sizes.samples):
        values = tuple(float(v) for v in rng.uniform(0.0, 2.0, size=3))
        coupling = Coupling(*values)
        eps = float(rng.uniform(-1.0, 1.0))
        c = harper_c(coupling, 0.0)
        closed = harper_i_eps_closed(coupling, eps)
        eps_q = _off_kinks(eps, i_eps_exact(c).kink_eps)
        if eps_q != eps:
            closed = harper_i_eps_closed(coupling, eps_q)
        residual = abs(i_eps_quadrature(c, eps_q) - closed)
        if residual >= harper_worst:
            harper_worst, harper_detail = residual, f"lambda={_label(values)} eps={eps_q:.4f}"
        closed_worst = max(closed_worst, abs(i_eps_exact(c)(eps_q) - closed))

    n = sizes.samples
    return [
        CheckRow.judge("jensen", f"max |quadrature - exact| over {n} random polynomials", 0.0, poly_worst, tol, poly_detail),
        CheckRow.judge("jensen", f"max |quadrature - closed form| over {n} Harper couplings", 0.0, harper_worst, tol, harper_detail),
        CheckRow.judge("jensen", f"max |exact - closed form| over {n} Harper couplings", 0.0, closed_worst, tol),
        CheckRow.judge("jensen", "profiles with non-integer or non-increasing slopes", 0.0, float(bad_slopes), 0.5),
    ]


def panel_quantization(sizes: PanelSizes, threads: Optional[int] = None) -> List[CheckRow]:
    """
    Integer accelerations and convexity of eps -> L(A_eps) away from kinks,
    plus the full profile against max(I, L_M + 2 pi |eps|).
    """
    rows = []
    freq = Frequency.golden()
    probes = (-0.4, -0.3, -0.2, 0.2, 0.3, 0.4)
    for values in [v for v in REGION_I if v[0] != v[2] and v[1] != v[0] + v[2]]:
        coupling = Coupling(*values)
        energy = _mid_band(coupling, freq, sizes, 1, threads)[0]
        cocycle = build_cocycle(coupling, freq, energy, "A")
        profile = epsilon_sweep(cocycle, -0.5, 0.5, sizes.sweep_steps, n=sizes.n, phase_samples=sizes.phases, threads=threads)
        detail = f"lambda={_label(values)} E={energy:.6f}"
        for eps in probes:
            try:
                acc = acceleration_at(profile, eps)
            except AtKink as exc:
                rows.append(
                    CheckRow(
                        panel="quantization",
                        check=f"acceleration at eps={eps:g}",
                        status=FAIL,
                        detail=f"{detail}: unexpected kink ({exc.message})",
                    )
                )
                continue
            rows.append(
                CheckRow.judge(
                    "quantization", f"acceleration at eps={eps:g}", float(acc.nearest_int), acc.omega, 0.05, detail
                )
            )
        second = profile.second_differences()
        rows.append(
            CheckRow(
                panel="quantization",
                check="min second difference >= -3 x noise floor",
                target=-profile.convexity_tolerance(),
                computed=float(second.min()),
                status=PASS if profile.is_convex() else FAIL,
                detail=detail,
            )
        )

    coupling = Coupling(*PROFILE_COUPLING)
    energy = _mid_band(coupling, freq, sizes, 1, threads)[0]
    cocycle = build_cocycle(coupling, freq, energy, "A")
    profile = epsilon_sweep(cocycle, -1.0, 1.0, sizes.sweep_steps, n=sizes.n, phase_samples=sizes.phases, threads=threads)
    worst, where = 0.0, 0.0
    for eps, value in zip(profile.eps_grid, profile.le_values):
        residual = abs(value - complex_le(coupling, eps).le_A_lower)
        if residual >= worst:
            worst, where = residual, eps
    rows.append(
        CheckRow.judge(
            "quantization",
            "max |L(A_eps) - max(I, L_M + 2 pi |eps|)| on [-1, 1]",
            0.0,
            worst,
            0.02 * sizes.tol_scale,
            f"lambda={_label(PROFILE_COUPLING)} E={energy:.6f} worst at eps={where:.3f}",
        )
    )
    return rows


def panel_asymptotics(sizes: PanelSizes, threads: Optional[int] = None) -> List[CheckRow]:
    """L(A_eps) - 2 pi |eps| at eps = +-2 against L_M, and log rho(M) against L_M."""
    freq = Frequency.golden()
    rows = []
    for values in REGION_I + [ASYMPTOTIC_EXTRA]:
        coupling = Coupling(*values)
        target = L_M(coupling)
        energy = _mid_band(coupling, freq, sizes, 1, threads)[0]
        cocycle = build_cocycle(coupling, freq, energy, "A")
        for eps in (-2.0, 2.0):
            computed = le_iterative(cocycle, eps, sizes.n, sizes.phases).estimate - TWO_PI * abs(eps)
            rows.append(
                CheckRow.judge(
                    "asymptotics",
                    f"L(A_eps) - 2 pi |eps| at eps={eps:g}",
                    target,
                    computed,
                    5e-3,
                    f"lambda={_label(values)} E={energy:.6f}",
                )
            )
        for side in (1, -1):
            rho = spectral_radius(m_matrix(coupling, freq.value, side))
            rows.append(
                CheckRow.judge(
                    "asymptotics", f"log rho(M) side {side:+d}", target, math.log(rho), 1e-9, f"lambda={_label(values)}"
                )
            )
    return rows


def _rational_task(task: Tuple[Coupling, Frequency, float, float]) -> float:
    coupling, freq, energy, eps = task
    return le_rational(build_cocycle(coupling, freq, energy, "B"), eps)


def _floquet_task(task: Tuple[Coupling, Frequency, int]):
    coupling, freq, theta_samples = task
    return spectrum_floquet(coupling, freq.p, freq.q, theta_samples)


def panel_continuity(sizes: PanelSizes, threads: Optional[int] = None) -> List[CheckRow]:
    """Rational exponents and spectra along the golden-mean convergents settle down."""
    golden = Frequency.golden()
    coupling = Coupling(*AMO)
    eps = 0.1
    energy = _mid_band(coupling, golden, sizes, 1, threads)[0]
    approximants = golden.convergents_between(21, sizes.q_max)
    detail = f"lambda={_label(AMO)} E={energy:.6f} eps={eps:g}"

    values = ordered_map(_rational_task, [(coupling, f, energy, eps) for f in approximants], threads)
    rows = [
        CheckRow(panel="continuity", check=f"L at beta={f.label}", computed=v, status=INFO, detail=detail)
        for f, v in zip(approximants, values)
    ]
    gaps = [abs(b - a) for a, b in zip(values, values[1:])]
    for (f, g), gap in zip(zip(approximants, approximants[1:]), gaps[:-1]):
        rows.append(
            CheckRow(panel="continuity", check=f"gap {f.label} -> {g.label}", computed=gap, status=INFO, detail=detail)
        )
    rows.append(
        CheckRow.judge(
            "continuity",
            f"gap {approximants[-2].label} -> {approximants[-1].label}",
            0.0,
            gaps[-1],
            0.01 * (2.0 if sizes.tol_scale > 1 else 1.0),
            detail,
        )
    )

    spectra = ordered_map(_floquet_task, [(coupling, f, sizes.floquet_phases) for f in approximants], threads)
    distances = [hausdorff(a, b) for a, b in zip(spectra, spectra[1:])]
    for (f, g), distance in zip(zip(approximants, approximants[1:]), distances):
        rows.append(
            CheckRow(
                panel="continuity",
                check=f"Hausdorff distance {f.label} -> {g.label}",
                computed=distance,
                status=INFO,
                detail=f"lambda={_label(AMO)}",
            )
        )
    rows.append(
        CheckRow.decreasing(
            "continuity",
            "Hausdorff distances decrease along the convergents",
            distances,
            slack=DECREASE_SLACK,
            resolution=BAND_SPACING,
            detail=f"lambda={_label(AMO)} slack={DECREASE_SLACK:g} resolution={BAND_SPACING:g}",
        )
    )
    return rows


def panel_oseledets(sizes: PanelSizes, threads: Optional[int] = None) -> List[CheckRow]:
    """Solution growth: contracting vectors of diagonal cocycles grow at -L + 2m, generic ones at L."""
    freq = Frequency.golden()
    rows = []
    for diag in ((2.0, 0.5), (4.0, 1.0)):
        cocycle = Cocycle.constant(freq, Mat2C.diag(*diag), label=f"diag{diag}")
        le = le_iterative(cocycle, 0.0, sizes.n, sizes.phases).estimate
        m = determinant_half_average(cocycle)
        contracting = solution_growth(cocycle, 0.0, (0.0, 1.0), sizes.n).forward_rate
        rows.append(
            CheckRow.judge("oseledets", "contracting vector rate = -L + 2m", -le + 2 * m, contracting, 1e-9, cocycle.label)
        )
        generic = solution_growth(cocycle, 0.0, (0.6, 0.8), sizes.n).forward_rate
        rows.append(CheckRow.judge("oseledets", "generic vector rate = L", le, generic, 0.05, cocycle.label))

    coupling = Coupling(*AMO)
    energy = _mid_band(coupling, freq, sizes, 1, threads)[0]
    cocycle = build_cocycle(coupling, freq, energy, "B")
    le = le_iterative(cocycle, 0.0, sizes.n, sizes.phases).estimate
    generic = solution_growth(cocycle, 0.309, (0.6, 0.8j), sizes.n).forward_rate
    rows.append(
        CheckRow.judge(
            "oseledets", "generic vector rate = L", le, generic, 0.05, f"lambda={_label(AMO)} E={energy:.6f}"
        )
    )
    return rows


PANEL_RUNNERS: Dict[str, Callable[[PanelSizes, Optional[int]], List[CheckRow]]] = {
    "thouless": panel_thouless,
    "duality": panel_duality,
    "jensen": panel_jensen,
    "quantization": panel_quantization,
    "asymptotics": panel_asymptotics,
    "continuity": panel_continuity,
    "oseledets": panel_oseledets,
}


def run_panel(panel: str, quick: bool = False, threads: Optional[int] = None) -> List[CheckRow]:
    """
    Run one verification panel.

    Args:
        panel: Panel name
        quick: Use reduced sizes
        threads: Worker count for parallel parts

    Returns:
        Check rows in a fixed order
    """
    if panel not in PANEL_RUNNERS:
        raise InputError(f"unknown panel {panel!r}; expected one of {', '.join(PANEL_RUNNERS)}")
    rows = PANEL_RUNNERS[panel](QUICK if quick else FULL, threads)
    failures = sum(1 for row in rows if row.status == FAIL)
    logger.info(f"verify {panel}: {len(rows)} checks, {failures} failed")
    return rows
