"""
Command-line interface.

    qpcocycle <command> [options]

Commands: le, sweep, accel, spectrum, region, duality, verify, serve.
Options may also come from a JSON file (``--config``) whose keys are the
flag names; flags given on the command line win. Exit codes: 0 ok,
1 a verification check failed, 2 bad input, 3 runtime error.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from qpcocycle import __version__
from qpcocycle.config import settings
from qpcocycle.exceptions import InputError, QPCocycleError
from qpcocycle.schemas.config import COMMAND_CONFIGS, PANELS
from qpcocycle.services.commands import COMMANDS
from qpcocycle.utils.logging_config import get_logger, setup_logging
from qpcocycle.utils.output import FORMATS, write_report

logger = get_logger(__name__)

GLOBAL_KEYS = ("format", "output", "threads", "log_level", "timings")
ALIASES = {"lambda": "coupling", "E": "energy"}

EPILOG = "All Lyapunov exponents and strip averages are in natural-log units (nats)."


# ============================================================================
# PARSER
# ============================================================================


def _global_options() -> argparse.ArgumentParser:
    group = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    group.add_argument("--format", choices=FORMATS, default=S, help="json (JSON lines) or csv (default json)")
    group.add_argument("--output", default=S, help="Write the data table to this file")
    group.add_argument("--config", default=S, help="JSON file with option values; flags win")
    group.add_argument("--threads", type=int, default=S, help="Worker count (default: machine parallelism)")
    group.add_argument("--log-level", dest="log_level", default=S, help="DEBUG, INFO, WARNING or ERROR")
    group.add_argument("--timings", action="store_true", default=S, help="Record runtimes in diagnostics")
    return group


def _cocycle_options(which: str) -> argparse.ArgumentParser:
    group = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    group.add_argument("--model", choices=["harper", "matrix"], default=S)
    group.add_argument("--lambda", dest="coupling", default=S, help="Harper couplings l1,l2,l3")
    group.add_argument("--matrix", default=S, help="Cocycle JSON file")
    group.add_argument("--beta", default=S, help="p/q, a decimal, golden or sqrt2m1 (default golden)")
    group.add_argument("--E", dest="energy", default=S, help="Energy, or 'mid' for a mid-band energy (default)")
    group.add_argument("--mid-index", dest="mid_index", type=int, default=S)
    group.add_argument("--which", choices=["A", "B"], default=S, help=f"Harper cocycle (default {which})")
    group.add_argument("--n", type=int, default=S, help=f"Product length (default {settings.LE_STEPS})")
    group.add_argument("--phases", type=int, default=S, help=f"Starting phases (default {settings.PHASE_SAMPLES})")
    group.add_argument("--backend", choices=["iterative", "rational"], default=S)
    group.add_argument("--quad-points", dest="quad_points", type=int, default=S)
    return group


def _sweep_options() -> argparse.ArgumentParser:
    group = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    group.add_argument("--eps-min", dest="eps_min", type=float, default=S)
    group.add_argument("--eps-max", dest="eps_max", type=float, default=S)
    group.add_argument("--steps", type=int, default=S)
    group.add_argument("--window", type=int, default=S)
    group.add_argument("--kink-tol", dest="kink_tol", type=float, default=S)
    return group


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpcocycle",
        description="Lyapunov exponents of quasi-periodic 2x2 cocycles and extended Harper's model.",
        epilog=EPILOG,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _global_options()
    S = argparse.SUPPRESS

    le = sub.add_parser(
        "le", parents=[common, _cocycle_options("B")], help="Lyapunov exponent of one cocycle", epilog=EPILOG
    )
    le.add_argument("--eps", type=float, default=S)

    sub.add_parser(
        "sweep",
        parents=[common, _cocycle_options("A"), _sweep_options()],
        help="eps -> L(D_eps) profile with slopes and kinks",
        epilog=EPILOG,
    )

    accel = sub.add_parser(
        "accel",
        parents=[common, _cocycle_options("A"), _sweep_options()],
        help="Accelerations read off an eps sweep",
        epilog=EPILOG,
    )
    accel.add_argument("--at", type=float, nargs="+", default=S, help="eps values to read")

    spectrum = sub.add_parser("spectrum", parents=[common], help="Approximate spectrum of the Harper operator")
    spectrum.add_argument("--lambda", dest="coupling", default=S)
    spectrum.add_argument("--beta", default=S)
    spectrum.add_argument("--method", choices=["truncation", "floquet"], default=S)
    spectrum.add_argument("--N", type=int, default=S, help=f"Truncation half-width (default {settings.TRUNCATION_SIZE})")
    spectrum.add_argument("--theta-samples", dest="theta_samples", type=int, default=S)
    spectrum.add_argument("--no-edge-filter", dest="edge_filter", action="store_false", default=S)
    spectrum.add_argument("--mid-bands", dest="mid_bands", type=int, default=S)
    spectrum.add_argument("--emit", choices=["intervals", "points"], default=S)

    region = sub.add_parser("region", parents=[common], help="Region, closed forms and criticality", epilog=EPILOG)
    region.add_argument("--lambda", dest="coupling", default=S)
    region.add_argument("--eps", type=float, default=S)

    duality = sub.add_parser("duality", parents=[common], help="Duality map and identity check", epilog=EPILOG)
    duality.add_argument("--lambda", dest="coupling", default=S)
    duality.add_argument("--check", action="store_true", default=S)
    duality.add_argument("--beta", default=S)
    duality.add_argument("--energies", type=float, nargs="+", default=S)
    duality.add_argument("--mid-bands", dest="mid_bands", type=int, default=S)
    duality.add_argument("--n", type=int, default=S)
    duality.add_argument("--phases", type=int, default=S)

    verify = sub.add_parser("verify", parents=[common], help="Run a verification panel")
    verify.add_argument("panel", nargs="?", choices=PANELS, default=S)
    verify.add_argument("--quick", action="store_true", default=S, help="Reduced sizes, wider tolerances")

    serve = sub.add_parser("serve", help="Run the HTTP API under uvicorn")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--log-level", dest="log_level", default=None)
    return parser


# ============================================================================
# CONFIG MERGING
# ============================================================================


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a JSON config file; keys may use dashes or underscores."""
    try:
        with Path(path).open("r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except FileNotFoundError:
        raise InputError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(payload, dict):
        raise InputError(f"config file {path} must hold a JSON object")
    return normalize_keys(payload)


def normalize_keys(values: Dict[str, Any]) -> Dict[str, Any]:
    result = {}
    for key, value in values.items():
        key = str(key).lstrip("-")
        key = ALIASES.get(key, key.replace("-", "_"))
        result[key] = value
    return result


def merge_options(flags: Dict[str, Any]) -> Dict[str, Any]:
    """Config file values overridden by explicit flags."""
    flags = dict(flags)
    path = flags.pop("config", None)
    merged = load_config_file(path) if path else {}
    merged.pop("config", None)
    merged.update(flags)
    return merged


def describe_validation_error(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        location = ".".join(str(p) for p in error["loc"]) or "config"
        parts.append(f"{location}: {error['msg']}")
    return "; ".join(parts)


# ============================================================================
# ENTRY POINT
# ============================================================================


def _serve(options: Dict[str, Any]) -> int:
    import uvicorn

    setup_logging(options.get("log_level"))
    uvicorn.run(
        "qpcocycle.main:app",
        host=options["host"],
        port=options["port"],
        log_level=(options.get("log_level") or settings.LOG_LEVEL).lower(),
    )
    return 0


def _fail(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command.

    Args:
        argv: Arguments without the program name (default sys.argv[1:])

    Returns:
        Process exit code
    """
    options = vars(build_parser().parse_args(argv))
    command = options.pop("command")
    if command == "serve":
        return _serve(options)

    try:
        merged = merge_options(options)
        extras = {key: merged.pop(key) for key in GLOBAL_KEYS if key in merged}
        setup_logging(extras.get("log_level"))
        config = COMMAND_CONFIGS[command].model_validate(merged)
        logger.debug(f"{command} config: {config.model_dump(by_alias=True, exclude_none=True)}")
        report = COMMANDS[command](config, threads=extras.get("threads"), timings=bool(extras.get("timings")))
        write_report(report, extras.get("format", "json"), extras.get("output"))
    except ValidationError as exc:
        _fail(describe_validation_error(exc))
        return 2
    except QPCocycleError as exc:
        _fail(exc.message)
        return exc.exit_code
    except Exception as exc:
        logger.exception(f"{command} failed")
        _fail(str(exc) or exc.__class__.__name__)
        return 3

    if report.failed:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
