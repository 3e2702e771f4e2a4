"""
Command line interface for the algebraic damping toolkit.

Usage:
    algdamp [global options] <command> [options]

Commands:
    analyze          Classify singularities and predict damping laws
    evolve           Compute an observable's time series (CSV)
    fit              Fit the decay exponent of a series file (JSON)
    spectrum         Power spectrum of a series file (CSV + peaks JSON)
    verify-kernels   Run the resolvent-kernel property suite
    reproduce        Run a table/figure reproduction case
    schema           Print the run-configuration JSON schema
    models           List registered models and perturbation families
"""

import argparse
import logging
import sys
from dataclasses import replace
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .analysis import fit_decay_exponent, spectrum
from .atlas import classify, predict_damping, predict_observable, resolve_cancellation, SingularityKind
from .config import ConfigParser, RunConfig, resolve_threads
from .errors import AnalysisError, ConfigError, DomainError
from .evolve import QuadratureScheduler
from .fields import IsochroneCosCos, Mode, NuOrders, Observable, Parity, PerturbationSpec
from .kernels import run_kernel_suite
from .presets import PRESETS, ReproductionRunner, get_preset
from .registry import model_registry
from .serialization import read_series, write_json, write_series, write_spectrum

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_DOMAIN = 3


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Send log records to stderr, plus a file when requested; stdout carries payloads."""
    numeric_level = getattr(logging, level.upper(), logging.INFO)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=numeric_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def _load_dotenv() -> None:
    try:
        from dotenv import load_dotenv
        load_dotenv()
    except ImportError:
        pass  # dotenv not available, continue without it


def parse_mode(text: str) -> Mode:
    try:
        return Mode.parse(text)
    except DomainError as e:
        raise ConfigError(str(e))


def parse_observable(text: str) -> Observable:
    """'A1'..'A4', or 'cos:m1,m2' / 'sin:m1,m2'."""
    if ":" not in text:
        try:
            return Observable.toy(text)
        except DomainError as e:
            raise ConfigError(str(e))
    parity, mode = text.split(":", 1)
    try:
        return Observable(parse_mode(mode), Parity(parity.strip().lower()))
    except ValueError:
        raise ConfigError(f"Observable must be A1..A4 or cos:m1,m2 / sin:m1,m2, got '{text}'")


def _window(values: Optional[Sequence[float]]):
    return tuple(values) if values else None


def _run_config(args: argparse.Namespace) -> RunConfig:
    """Config file (if any) with command-line overrides applied, then validated."""
    config = ConfigParser.parse_config(args.config) if getattr(args, "config", None) else RunConfig()
    updates: Dict[str, Any] = {}
    if getattr(args, "model", None):
        updates["model"] = config.model.model_copy(update={"name": args.model})
    if getattr(args, "bins", None):
        updates["quadrature"] = config.quadrature.model_copy(update={"bins": args.bins})
    time_updates = {key: getattr(args, key) for key in ("t0", "dt", "n_samples")
                    if getattr(args, key, None) is not None}
    if time_updates:
        updates["time"] = config.time.model_copy(update=time_updates)
    if updates:
        config = config.model_copy(update=updates)

    errors = ConfigParser.validate_config(config)
    if errors:
        raise ConfigError(f"Configuration validation failed: {errors}")
    return config


def _perturbation_for_mode(spec: PerturbationSpec, mode: Mode) -> PerturbationSpec:
    """The configured perturbation, or its isochrone cos-cos sibling that excites `mode`."""
    if spec.supports(mode) or not isinstance(spec, IsochroneCosCos):
        return spec
    logger.info(f"Perturbation {spec.n2},{spec.n3} does not excite mode {mode}; "
                f"using isochrone-cos-cos {abs(mode.m1)},{abs(mode.m2)}")
    return replace(spec, n2=abs(mode.m1), n3=abs(mode.m2))


def _mode_report(model, spec, mode: Mode, domain) -> Dict[str, Any]:
    spec = _perturbation_for_mode(spec, mode)
    singularities = classify(model, mode, domain, spec)
    laws = []
    for sing in singularities:
        entry: Dict[str, Any] = {"singularity": sing.to_dict()}
        if sing.special:
            entry["law"] = None
            entry["note"] = "special vertex: no tabulated damping law"
            laws.append(entry)
            continue
        if sing.line_adjacent:
            entry["law"] = None
            entry["note"] = "line endpoint: law carried by the line"
            laws.append(entry)
            continue
        if sing.kind is SingularityKind.INFINITY:
            orders = NuOrders(0, 0, decay=sing.nu_decay)
        else:
            orders = spec.local_orders(sing.location)
        try:
            law = predict_damping(sing, orders)
        except DomainError as e:
            entry["law"] = None
            entry["error"] = str(e)
            laws.append(entry)
            continue
        entry["law"] = law.to_dict()
        if not law.vanishes:
            entry["resolutions"] = {
                parity.value: resolve_cancellation(law, Observable(mode, parity)).to_dict()
                for parity in Parity
            }
        laws.append(entry)
    predictions = {}
    if spec.supports(mode):
        for parity in Parity:
            prediction = predict_observable(model, spec, Observable(mode, parity), domain)
            predictions[parity.value] = {"label": prediction.label, "power": prediction.power,
                                         "omega0": prediction.omega0,
                                         "all_orders_cancelled": prediction.all_orders_cancelled}
    return {"mode": str(mode), "perturbation": spec.to_dict(), "singularities": laws,
            "predictions": predictions}


def cmd_analyze(args: argparse.Namespace) -> int:
    config = _run_config(args)
    model = config.create_model()
    spec = config.create_perturbation(model)
    domain = config.create_domain()
    if args.mode:
        modes = [parse_mode(text) for text in args.mode]
    else:
        modes = list(dict.fromkeys(o.n for o in config.create_observables(spec)))
    report = {
        "model": model.to_dict(),
        "perturbation": spec.to_dict(),
        "domain": domain.to_dict(),
        "modes": [_mode_report(model, spec, mode, domain) for mode in modes],
    }
    write_json(report, args.out)
    return EXIT_OK


def cmd_evolve(args: argparse.Namespace) -> int:
    config = _run_config(args)
    model = config.create_model()
    spec = config.create_perturbation(model)
    observables = [parse_observable(args.observable)] if args.observable else config.create_observables(spec)
    if len(observables) != 1:
        raise ConfigError(f"evolve needs exactly one observable, got {len(observables)}; use --observable")
    quad = config.create_quadrature()
    t = config.time
    with QuadratureScheduler(resolve_threads(args.threads, config)) as scheduler:
        series = scheduler.evolve_series(model, spec, observables[0], t.t0, t.dt, t.n_samples, quad)
    write_series(series, args.out)
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    series = read_series(args.series)
    window = _window(args.window) or (series.t0, series.t_end)
    fit = fit_decay_exponent(series, window)
    write_json(fit, args.out)
    return EXIT_OK


def cmd_spectrum(args: argparse.Namespace) -> int:
    series = read_series(args.series)
    result = spectrum(series, _window(args.window))
    if args.csv:
        write_spectrum(result, args.csv)
    write_json(result, args.out)
    return EXIT_OK


def cmd_verify_kernels(args: argparse.Namespace) -> int:
    report = run_kernel_suite()
    write_json(report, args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_reproduce(args: argparse.Namespace) -> int:
    preset = get_preset(args.case, bins=args.bins, t_end=args.t_end)
    with QuadratureScheduler(resolve_threads(args.threads)) as scheduler:
        report = ReproductionRunner(scheduler, seed=args.seed).run(preset)
    write_json(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_FAILED


def cmd_schema(args: argparse.Namespace) -> int:
    write_json(RunConfig.json_schema(), args.out)
    return EXIT_OK


def cmd_models(args: argparse.Namespace) -> int:
    write_json({"models": model_registry.list_models(),
                "perturbations": model_registry.list_perturbations()}, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="algdamp",
        description="Algebraic damping: singularity analysis and exact advection evolution",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  algdamp analyze --model composite-toy --mode 1,1
  algdamp evolve --model composite-toy --observable A2 --bins 1024 --out a2.csv
  algdamp fit a2.csv --window 100 1000
  algdamp spectrum series.csv --window 77 1100 --csv spectrum.csv
  algdamp reproduce fig8 --threads 8 --out fig8.json
        """
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default="WARNING",
                        help="Set logging level (default: WARNING)")
    parser.add_argument("--log-file", help="Also write log records to this file")
    parser.add_argument("--threads", type=int, help="Worker threads (default: $ALGDAMP_THREADS or CPU count)")

    sub = parser.add_subparsers(dest="command", required=True)

    def with_out(p):
        p.add_argument("--out", help="Output file (default: stdout)")
        return p

    def with_run(p):
        p.add_argument("--config", help="JSON or YAML run configuration")
        p.add_argument("--model", help="Registered model name (overrides the config)")
        p.add_argument("--bins", type=int, help="Grid bins per dimension")
        return p

    p = with_out(with_run(sub.add_parser("analyze", help="Classify singularities and predict damping")))
    p.add_argument("--mode", action="append", help="Mode m1,m2 (repeatable)")
    p.set_defaults(func=cmd_analyze)

    p = with_out(with_run(sub.add_parser("evolve", help="Compute a time series")))
    p.add_argument("--observable", help="A1..A4, or cos:m1,m2 / sin:m1,m2")
    p.add_argument("--t0", type=float, help="First sample time")
    p.add_argument("--dt", type=float, help="Sample spacing")
    p.add_argument("--n-samples", dest="n_samples", type=int, help="Number of samples")
    p.set_defaults(func=cmd_evolve)

    p = with_out(sub.add_parser("fit", help="Fit the decay exponent of a series"))
    p.add_argument("series", help="CSV with header t,value")
    p.add_argument("--window", type=float, nargs=2, metavar=("T_MIN", "T_MAX"))
    p.set_defaults(func=cmd_fit)

    p = with_out(sub.add_parser("spectrum", help="Power spectrum and peaks of a series"))
    p.add_argument("series", help="CSV with header t,value")
    p.add_argument("--window", type=float, nargs=2, metavar=("T_MIN", "T_MAX"))
    p.add_argument("--csv", help="Write the spectrum as frequency,power CSV")
    p.set_defaults(func=cmd_spectrum)

    p = with_out(sub.add_parser("verify-kernels", help="Run the kernel property suite"))
    p.set_defaults(func=cmd_verify_kernels)

    p = with_out(sub.add_parser("reproduce", help="Run a reproduction case"))
    p.add_argument("case", choices=list(PRESETS))
    p.add_argument("--bins", type=int, help="Grid bins per dimension")
    p.add_argument("--t-end", dest="t_end", type=float, help="Last sample time")
    p.add_argument("--seed", type=int, default=0, help="Seed for sampled zero checks")
    p.set_defaults(func=cmd_reproduce)

    p = with_out(sub.add_parser("schema", help="Print the run-configuration JSON schema"))
    p.set_defaults(func=cmd_schema)

    p = with_out(sub.add_parser("models", help="List models and perturbation families"))
    p.set_defaults(func=cmd_models)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point; returns the process exit code."""
    _load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level, args.log_file)

    try:
        return args.func(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        write_json({"error": str(e), "kind": "config"})
        return EXIT_CONFIG
    except (DomainError, AnalysisError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        write_json({"error": str(e), "kind": type(e).__name__})
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
