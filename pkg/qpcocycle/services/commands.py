"""
Command services shared by the CLI and the HTTP routers.

Each ``cmd_*`` takes a validated run configuration and returns a
ReportRecord. Every number in a report comes straight from one core
operation; runtimes are only recorded when ``timings`` is set so that
identical configurations give identical reports.
"""

import json
import math
import time
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from qpcocycle.core.cocycle_engine import (
    Cocycle,
    acceleration_at,
    epsilon_sweep,
    le_iterative,
    le_rational,
)
from qpcocycle.core.coupling import Coupling
from qpcocycle.core.frequency import Frequency
from qpcocycle.core.harper import (
    aubry_andre_le,
    build_cocycle,
    complex_le,
    criticality,
    duality,
    duality_le_identity_check,
    harper_i_closed,
    m_matrix,
    region,
)
from qpcocycle.core.jensen import harper_i_eps_closed
from qpcocycle.core.spectrum import (
    hamiltonian_bound,
    measure,
    mid_band_energies,
    spectrum_floquet,
    spectrum_truncation,
)
from qpcocycle.core.trigcore import spectral_radius
from qpcocycle.exceptions import AtKink, InputError
from qpcocycle.schemas.config import (
    AccelConfig,
    CocycleConfig,
    DualityConfig,
    LeConfig,
    RegionConfig,
    SpectrumConfig,
    SweepConfig,
    VerifyConfig,
)
from qpcocycle.schemas.report import FAIL, ReportRecord
from qpcocycle.services import verification
from qpcocycle.utils.logging_config import get_logger

logger = get_logger(__name__)


# ============================================================================
# SHARED RESOLUTION
# ============================================================================


def load_matrix(source: Any) -> Dict[str, Any]:
    """Cocycle description from an inline object or a JSON file path."""
    if isinstance(source, dict):
        return source
    path = Path(str(source))
    try:
        with path.open("r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except FileNotFoundError:
        raise InputError(f"matrix file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"matrix file {path} is not valid JSON: {exc}")
    if not isinstance(payload, dict):
        raise InputError(f"matrix file {path} must hold a JSON object")
    return payload


def resolve_energy(
    coupling: Coupling,
    freq: Frequency,
    energy: Any,
    mid_index: Optional[int] = None,
    threads: Optional[int] = None,
) -> Tuple[float, Dict[str, Any]]:
    """
    A fixed energy, or a mid-band energy of the truncated spectrum for "mid".

    Returns the energy and the provenance recorded in the report.
    """
    if energy != "mid":
        return float(energy), {"energy_source": "given"}
    spectrum = spectrum_truncation(coupling, freq, threads=threads)
    energies = mid_band_energies(spectrum)
    index = len(energies) // 2 if mid_index is None else mid_index
    if index >= len(energies):
        raise InputError(f"mid_index {index} out of range: {len(energies)} mid-band energies")
    return energies[index], {
        "energy_source": "mid-band",
        "mid_band_energies": energies,
        "mid_index": index,
        "truncation": spectrum.params,
    }


def resolve_cocycle(
    config: CocycleConfig, freq: Frequency, threads: Optional[int] = None
) -> Tuple[Cocycle, Optional[Coupling], Dict[str, Any]]:
    """Build the configured cocycle; returns it, the coupling (Harper only) and provenance."""
    if config.model == "matrix":
        return Cocycle.from_json(load_matrix(config.matrix), freq), None, {}
    coupling = Coupling.parse(config.coupling)
    energy, provenance = resolve_energy(coupling, freq, config.energy, config.mid_index, threads)
    provenance["energy"] = energy
    return build_cocycle(coupling, freq, energy, config.which), coupling, provenance


def _inputs(config: Any) -> Dict[str, Any]:
    return config.model_dump(mode="json", by_alias=True, exclude_none=True)


def _finish(report: ReportRecord, started: float, timings: bool) -> ReportRecord:
    if timings:
        report.diagnostics["runtime_s"] = round(time.perf_counter() - started, 6)
    logger.info(f"{report.command} finished")
    return report


# ============================================================================
# COCYCLE COMMANDS
# ============================================================================


def cmd_le(config: LeConfig, threads: Optional[int] = None, timings: bool = False) -> ReportRecord:
    """Lyapunov exponent of one cocycle (iterative or rational backend), with its convergence sequence."""
    started = time.perf_counter()
    freq = Frequency.parse(config.beta)
    cocycle, coupling, provenance = resolve_cocycle(config, freq, threads)

    outputs: Dict[str, Any] = {"backend": config.backend, "cocycle": cocycle.label}
    diagnostics: Dict[str, Any] = dict(provenance)
    rows = []
    if config.backend == "rational":
        outputs["le"] = le_rational(cocycle, config.eps, config.quad_points)
        diagnostics["quad_points"] = config.quad_points or 64 * freq.q
    else:
        estimate = le_iterative(cocycle, config.eps, config.n, config.phases)
        outputs["le"] = estimate.estimate
        outputs["n"] = estimate.n
        rows = [{"n": k, "le_n": value} for k, value in estimate.upper_sequence]
        diagnostics.update(
            phase_samples=estimate.phase_samples,
            flagged=estimate.flagged,
            noise_floor=estimate.noise_floor,
        )

    if coupling is not None:
        closed = complex_le(coupling, config.eps)
        outputs["closed_form_on_spectrum"] = (
            closed.le_B_on_spectrum if config.which == "B" else closed.le_A_lower
        )
    report = ReportRecord(command="le", inputs=_inputs(config), outputs=outputs, rows=rows, diagnostics=diagnostics)
    return _finish(report, started, timings)


def _profile_for(config: SweepConfig, threads: Optional[int]):
    freq = Frequency.parse(config.beta)
    cocycle, coupling, provenance = resolve_cocycle(config, freq, threads)
    profile = epsilon_sweep(
        cocycle,
        config.eps_min,
        config.eps_max,
        config.steps,
        le_backend=config.backend,
        n=config.n,
        phase_samples=config.phases,
        quad_points=config.quad_points,
        window=config.window,
        slope_kink_tol=config.kink_tol,
        threads=threads,
    )
    return cocycle, coupling, provenance, profile


def _profile_diagnostics(profile, provenance: Dict[str, Any]) -> Dict[str, Any]:
    second = profile.second_differences()
    diagnostics = dict(provenance)
    diagnostics.update(
        noise_floor=profile.noise_floor,
        flagged=profile.flagged,
        convexity_tolerance=profile.convexity_tolerance(),
        min_second_difference=float(second.min()) if len(second) else None,
        window=profile.window,
    )
    return diagnostics


def cmd_sweep(config: SweepConfig, threads: Optional[int] = None, timings: bool = False) -> ReportRecord:
    """eps -> L(D_eps) on a grid, with window slopes (2*pi units) and kinks."""
    started = time.perf_counter()
    cocycle, coupling, provenance, profile = _profile_for(config, threads)
    rows = profile.rows()
    if coupling is not None:
        for row in rows:
            closed = complex_le(coupling, row["eps"])
            row["closed_form"] = closed.le_B_on_spectrum if config.which == "B" else closed.le_A_lower
    outputs = {
        "cocycle": cocycle.label,
        "backend": profile.backend,
        "kinks": list(profile.kinks),
        "convex": profile.is_convex(),
    }
    report = ReportRecord(
        command="sweep",
        inputs=_inputs(config),
        outputs=outputs,
        rows=rows,
        diagnostics=_profile_diagnostics(profile, provenance),
    )
    return _finish(report, started, timings)


def cmd_accel(config: AccelConfig, threads: Optional[int] = None, timings: bool = False) -> ReportRecord:
    """Accelerations read off a sweep; points at a kink report both one-sided slopes."""
    started = time.perf_counter()
    cocycle, _, provenance, profile = _profile_for(config, threads)
    rows = []
    for eps in config.at:
        try:
            acc = acceleration_at(profile, eps)
            rows.append(
                {
                    "eps": eps,
                    "omega": acc.omega,
                    "nearest_int": acc.nearest_int,
                    "residual": acc.residual,
                    "at_kink": False,
                    "left_slope": None,
                    "right_slope": None,
                }
            )
        except AtKink as exc:
            logger.warning(exc.message)
            rows.append(
                {
                    "eps": eps,
                    "omega": None,
                    "nearest_int": None,
                    "residual": None,
                    "at_kink": True,
                    "left_slope": exc.left_slope,
                    "right_slope": exc.right_slope,
                }
            )
    residuals = [row["residual"] for row in rows if row["residual"] is not None]
    outputs = {
        "cocycle": cocycle.label,
        "kinks": list(profile.kinks),
        "max_residual": max(residuals) if residuals else None,
        "points_at_kinks": sum(1 for row in rows if row["at_kink"]),
    }
    report = ReportRecord(
        command="accel",
        inputs=_inputs(config),
        outputs=outputs,
        rows=rows,
        diagnostics=_profile_diagnostics(profile, provenance),
    )
    return _finish(report, started, timings)


# ============================================================================
# HARPER COMMANDS
# ============================================================================


def cmd_spectrum(config: SpectrumConfig, threads: Optional[int] = None, timings: bool = False) -> ReportRecord:
    """Approximate spectrum: merged intervals (or raw points), measure and mid-band energies."""
    started = time.perf_counter()
    coupling = Coupling.parse(config.coupling)
    freq = Frequency.parse(config.beta)
    if config.method == "floquet":
        spectrum = spectrum_floquet(coupling, freq.p, freq.q, config.theta_samples, threads=threads)
    else:
        spectrum = spectrum_truncation(
            coupling, freq, config.theta_samples, config.N, edge_filter=config.edge_filter, threads=threads
        )

    if config.emit == "points":
        rows = [{"energy": float(e)} for e in spectrum.points]
    else:
        rows = [{"lo": lo, "hi": hi, "length": hi - lo} for lo, hi in spectrum.merged_intervals]
    outputs = {
        "method": spectrum.method,
        "measure": measure(spectrum),
        "min": float(spectrum.points[0]),
        "max": float(spectrum.points[-1]),
        "intervals": len(spectrum.merged_intervals),
        "points": len(spectrum),
        "hamiltonian_bound": hamiltonian_bound(coupling),
        "mid_band_energies": mid_band_energies(spectrum, config.mid_bands),
    }
    report = ReportRecord(
        command="spectrum",
        inputs=_inputs(config),
        outputs=outputs,
        rows=rows,
        diagnostics={"params": spectrum.params, "skipped_phases": spectrum.skipped_phases},
    )
    return _finish(report, started, timings)


def cmd_region(config: RegionConfig, threads: Optional[int] = None, timings: bool = False) -> ReportRecord:
    """Region, closed-form exponents, criticality and the dual coupling."""
    started = time.perf_counter()
    coupling = Coupling.parse(config.coupling)
    tag = region(coupling)
    verdict = criticality(coupling)
    closed = complex_le(coupling, config.eps)
    outputs: Dict[str, Any] = {
        "region": tag.tag,
        "on_boundary": sorted(tag.on_boundary),
        "L_M": verdict.L_M,
        "I": harper_i_closed(coupling),
        "I_eps": harper_i_eps_closed(coupling, config.eps),
        "delta": verdict.delta,
        "le_on_spectrum": verdict.le_on_spectrum,
        "criticality": verdict.criticality,
        "regular": verdict.regular,
        "has_real_zeros": verdict.has_real_zeros,
        "le_A_eps_on_spectrum": closed.le_A_lower,
        "le_B_eps_on_spectrum": closed.le_B_on_spectrum,
        "log_rho_M_plus": math.log(spectral_radius(m_matrix(coupling, 0.0, 1))),
        "log_rho_M_minus": math.log(spectral_radius(m_matrix(coupling, 0.0, -1))),
    }
    l1, l2, l3 = coupling.as_floats()
    if l1 == 0 and l3 == 0:
        outputs["aubry_andre_le"] = aubry_andre_le(1.0 / l2, config.eps)
    if l2 > 0:
        dual = duality(coupling)
        outputs["dual"] = str(dual)
        outputs["dual_region"] = region(dual).tag
    report = ReportRecord(command="region", inputs=_inputs(config), outputs=outputs)
    return _finish(report, started, timings)


def cmd_duality(config: DualityConfig, threads: Optional[int] = None, timings: bool = False) -> ReportRecord:
    """The dual coupling, and optionally the numeric duality identity at several energies."""
    started = time.perf_counter()
    coupling = Coupling.parse(config.coupling)
    dual = duality(coupling)
    outputs: Dict[str, Any] = {
        "dual": str(dual),
        "region": region(coupling).tag,
        "dual_region": region(dual).tag,
        "le_on_spectrum": criticality(coupling).le_on_spectrum,
        "dual_le_on_spectrum": criticality(dual).le_on_spectrum,
        "log_average": math.log(float(coupling.lambda2)) + harper_i_closed(dual) - harper_i_closed(coupling),
    }
    rows = []
    diagnostics: Dict[str, Any] = {}
    if config.check:
        freq = Frequency.parse(config.beta)
        energies = config.energies
        if energies is None:
            spectrum = spectrum_truncation(coupling, freq, threads=threads)
            energies = mid_band_energies(spectrum, config.mid_bands)
            diagnostics["truncation"] = spectrum.params
        for energy in energies:
            check = duality_le_identity_check(coupling, freq, energy, config.n, config.phases)
            rows.append(
                {
                    "E": energy,
                    "le_original": check.le_original,
                    "le_dual": check.le_dual,
                    "log_average": check.log_average,
                    "residual": check.residual,
                }
            )
        outputs["max_residual"] = max(row["residual"] for row in rows)
    report = ReportRecord(command="duality", inputs=_inputs(config), outputs=outputs, rows=rows, diagnostics=diagnostics)
    return _finish(report, started, timings)


# ============================================================================
# VERIFICATION
# ============================================================================


def cmd_verify(config: VerifyConfig, threads: Optional[int] = None, timings: bool = False) -> ReportRecord:
    """Run one verification panel; the report lists every check with PASS/FAIL."""
    started = time.perf_counter()
    checks = verification.run_panel(config.panel, quick=config.quick, threads=threads)
    rows = [row.model_dump() for row in checks]
    failures = sum(1 for row in rows if row["status"] == FAIL)
    outputs = {"panel": config.panel, "checks": len(rows), "failures": failures, "passed": failures == 0}
    report = ReportRecord(command="verify", inputs=_inputs(config), outputs=outputs, rows=rows)
    return _finish(report, started, timings)


COMMANDS = {
    "le": cmd_le,
    "sweep": cmd_sweep,
    "accel": cmd_accel,
    "spectrum": cmd_spectrum,
    "region": cmd_region,
    "duality": cmd_duality,
    "verify": cmd_verify,
}
