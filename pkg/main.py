#!/usr/bin/env python3
"""
Photosensitizer screening toolkit - command-line entry point

Loads active-space integrals, factorizes them, synthesizes spectral filters,
simulates the window and spin-orbit observables classically and assembles
logical resource estimates for the quantum algorithms that would measure them.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

# Add the project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from config.config_manager import ConfigManager  # noqa: E402
from controllers.application_controller import EXIT_IO, EXIT_USAGE, ApplicationController  # noqa: E402
from hamiltonian_io.units import parse_window_spec  # noqa: E402
from models.errors import ScreeningError, ValidationError  # noqa: E402
from models.run_config import RunConfig  # noqa: E402


def setup_logging(config: Dict) -> None:
    """Setup application logging; stdout stays reserved for machine-readable output"""
    log_level = getattr(logging, str(config.get('log_level', 'INFO')).upper(), logging.INFO)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.get('log_file'):
        handlers.append(logging.FileHandler(config['log_file'], mode='w'))
    logging.basicConfig(
        level=log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="alternate config.json")
    common.add_argument("--output", help="result file; format from suffix (.json, .csv, .xlsx)")
    common.add_argument("--json", action="store_true", dest="print_json", help="print the payload to stdout")
    common.add_argument("--seed", type=int, help="seed for stochastic steps")
    common.add_argument("--solvent", help="solvent description applied after loading")
    common.add_argument("--log-level", help="override the configured log level")

    tolerances = argparse.ArgumentParser(add_help=False)
    tolerances.add_argument("--eps-h", type=float, help="filter error outside the transition band")
    tolerances.add_argument("--eps-samp", type=float, help="sampling accuracy")
    tolerances.add_argument("--delta-samp", type=float, help="sampling failure probability")

    integrals = argparse.ArgumentParser(add_help=False)
    integrals.add_argument("input", nargs="?", help="integral file (or dense JSON system for simulate-window)")
    integrals.add_argument("--integrals", help="same as the positional input")

    parser = argparse.ArgumentParser(prog="photoqre", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factorize", parents=[common, integrals], help="THC or CDF factorization of the two-body tensor")
    p.add_argument("--method", choices=["thc", "cdf"], default="cdf")
    p.add_argument("--threshold", type=float, default=1e-6)
    p.add_argument("--max-rank", type=int)
    p.add_argument("--refine", action="store_true", help="refine CDF rotations after the core fit")

    p = sub.add_parser("fit-degree", parents=[common, tolerances], help="filter degree against lambda'/Delta")
    p.add_argument("--range", dest="range_spec", default="50:2000:6", help="start:stop:count")
    p.add_argument("--synthesize", action="store_true", help="also synthesize certified filters")

    p = sub.add_parser("simulate-window", parents=[common, tolerances, integrals],
                       help="window absorption, exact and sampled")
    p.add_argument("--window", required=True, help="lo,hi followed by nm or Ha")
    p.add_argument("--delta", type=float, help="transition width in Hartree")
    p.add_argument("--shots", type=int, help="override the double-measurement shot count")
    p.add_argument("--ideal-filters", action="store_true", help="exact window indicators instead of polynomials")
    p.add_argument("--threshold", type=float, help="CDF threshold used for the identity shift and 1-norm")

    p = sub.add_parser("isc-proxy", parents=[common, integrals], help="short-time spin-orbit transition proxy")
    p.add_argument("--t-grid", "--times", dest="times", default="1e-3:1e-1:8", help="start:stop:count, log-spaced")
    p.add_argument("--soc", help="file whose SOC sections replace those of the integrals")
    p.add_argument("--channel", default="total", help="total, 0,0, 1,0, 1,+1 or 1,-1")
    p.add_argument("--m", type=int, default=0, help="triplet S_z projection")
    p.add_argument("--singlet-root", type=int, default=1)
    p.add_argument("--hadamard", action="store_true", help="also report modified Hadamard readouts")

    p = sub.add_parser("trotter-audit", parents=[common, integrals], help="second-order product formula bias audit")
    p.add_argument("--threshold", type=float, default=1e-8)
    p.add_argument("--steps", default="0.4,0.2,0.1,0.05")
    p.add_argument("--window", help="lo,hi followed by nm or Ha; adds step budgets")
    p.add_argument("--delta", type=float)
    p.add_argument("--xi", type=float, default=0.1)

    p = sub.add_parser("vibronic-run", parents=[common], help="grid wavepacket propagation and ISC rate")
    p.add_argument("input")
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--initial-state", type=int, default=0)
    p.add_argument("--fit-window", help="t0,t1")

    p = sub.add_parser("vibronic-resources", parents=[common], help="logical cost of grid propagation")
    p.add_argument("--n-el", type=int, default=5)
    p.add_argument("--modes", type=int, default=19)
    p.add_argument("--grid-k", type=int, default=128)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--n-steps", type=float, default=3.7e5)

    p = sub.add_parser("estimate", parents=[common, tolerances], help="resource tables over a preset")
    p.add_argument("family", choices=["absorption", "isc", "trotter", "vibronic"])
    p.add_argument("--preset", required=True, help="preset name or JSON path")
    p.add_argument("--batch-b", type=int)
    p.add_argument("--xi", type=float, default=0.1)
    return parser


OPTION_KEYS = {
    "factorize": ("method", "threshold", "max_rank", "refine"),
    "fit-degree": ("synthesize",),
    "simulate-window": ("delta", "shots", "ideal_filters", "threshold"),
    "isc-proxy": ("times", "soc", "channel", "m", "singlet_root", "hadamard"),
    "trotter-audit": ("threshold", "steps", "delta"),
    "vibronic-run": ("dt", "steps", "record_every", "initial_state", "fit_window"),
    "vibronic-resources": ("n_el", "grid_k", "degree", "n_steps"),
    "estimate": ("family", "batch_b"),
}

INTEGRAL_COMMANDS = ("factorize", "simulate-window", "isc-proxy", "trotter-audit")


def run_config_from_args(args: argparse.Namespace, config: Dict) -> RunConfig:
    options = {key: getattr(args, key) for key in OPTION_KEYS[args.command] if getattr(args, key, None) is not None}
    if args.command == "fit-degree":
        options["range"] = args.range_spec
    if args.command == "vibronic-resources":
        options["m_modes"] = args.modes
    source = getattr(args, "integrals", None) or getattr(args, "input", None)
    if args.command in INTEGRAL_COMMANDS:
        if args.integrals and args.input and args.integrals != args.input:
            raise ValidationError(f"--integrals {args.integrals} conflicts with positional input {args.input}")
        if not source:
            raise ValidationError(f"{args.command} needs --integrals F")
    window = parse_window_spec(args.window) if getattr(args, "window", None) else None
    seed = args.seed
    if seed is None and args.command == "simulate-window":
        seed = int(config["default_seed"])
    return RunConfig(
        command=args.command,
        inputs=(source,) if source else (),
        window=window,
        eps_h=args.eps_h if getattr(args, "eps_h", None) is not None else config["eps_h"],
        eps_samp=args.eps_samp if getattr(args, "eps_samp", None) is not None else config["eps_samp"],
        delta_samp=args.delta_samp if getattr(args, "delta_samp", None) is not None else config["delta_samp"],
        xi=getattr(args, "xi", 0.1),
        seed=seed,
        output=args.output,
        print_json=args.print_json,
        preset=getattr(args, "preset", None),
        solvent=args.solvent,
        options=options,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_USAGE

    if args.config and not Path(args.config).exists():
        sys.stderr.write(json.dumps({"error": "FileNotFoundError", "message": f"config file {args.config} not found",
                                     "command": args.command}, sort_keys=True) + "\n")
        return EXIT_IO
    config_manager = ConfigManager(args.config)
    config = config_manager.load_config()
    if args.log_level:
        config["log_level"] = args.log_level
    setup_logging(config)
    logger = logging.getLogger(__name__)
    logger.info(f"Starting photoqre {args.command}")

    try:
        run_config = run_config_from_args(args, config)
    except ScreeningError as e:
        logger.error(f"Invalid arguments: {e}")
        sys.stderr.write(json.dumps(dict(e.to_dict(), command=args.command), sort_keys=True) + "\n")
        return EXIT_USAGE
    return ApplicationController(config).run(run_config)


if __name__ == "__main__":
    sys.exit(main())
