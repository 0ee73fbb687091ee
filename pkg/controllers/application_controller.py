"""
Application controller: runs one command-line pipeline and maps failures to exit codes
"""

import dataclasses
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional, TextIO, Tuple

import numpy as np
import scipy.linalg

from export.result_exporter import ResultExporter
from factorization.cdf import cdf_factorize
from factorization.lcu import identity_shift, one_norm, pauli_one_body
from factorization.thc import thc_factorize
from hamiltonian_io.dense_system import DenseSystem, load_dense_system, many_body_system
from hamiltonian_io.integral_reader import load_hamiltonian
from hamiltonian_io.solvent import apply_solvent, load_solvent
from isc_proxy.evolution import channel_operator, log_log_slope, parse_time_grid, proxy_series
from isc_proxy.hadamard import modified_hadamard
from isc_proxy.references import reference_states
from models.errors import IntegralFormatError, ScreeningError, ValidationError
from models.hamiltonian import LoadedIntegrals
from models.run_config import RunConfig
from models.spectral import SpectralWindow
from qsp_filter.degree_fit import degree_table
from qsp_filter.heaviside import build_window_filters
from resource_estimator.presets import preset_table
from trotter_engine.error_bounds import delta_max, verify_bias, y3_norm_exact, y3_norm_heuristic
from trotter_engine.product_formula import TrotterPropagator
from trotter_engine.rescaling import pad_and_rescale
from utils.fock_space import FockSpace, molecular_hamiltonian, spin_operators
from utils.resource_manager import resource_manager
from vibronic_engine.dynamics import extract_rate, propagate
from vibronic_engine.grid_model import VibronicGrid, load_vibronic_model
from vibronic_engine.resources import vibronic_resources
from window_simulator.absorption import exact_window_absorption
from window_simulator.sampling import build_sampling_plan, simulate_shots

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FLAGGED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_OTHER = 4


class CommandResult(NamedTuple):
    payload: Dict[str, Any]
    rows: List[Dict[str, Any]]
    flagged: bool = False


def parse_range(text: str) -> np.ndarray:
    """'a:b:n' -> n evenly spaced values from a to b"""
    try:
        a, b, n = text.split(":")
        values = np.linspace(float(a), float(b), int(n))
    except ValueError as e:
        raise ValidationError(f"cannot parse range {text!r}; expected 'start:stop:count'") from e
    if values.size < 1:
        raise ValidationError(f"range {text!r} is empty")
    return values


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ValidationError(f"cannot parse number list {text!r}") from e


class ApplicationController:
    """Executes a RunConfig against the loaded configuration"""

    def __init__(self, config: Dict[str, Any], stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None):
        self.config = config
        self.exporter = ResultExporter(config)
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr
        self._commands: Dict[str, Callable[[RunConfig], CommandResult]] = {
            "factorize": self.factorize,
            "fit-degree": self.fit_degree,
            "simulate-window": self.simulate_window,
            "isc-proxy": self.isc_proxy,
            "trotter-audit": self.trotter_audit,
            "vibronic-run": self.vibronic_run,
            "vibronic-resources": self.vibronic_resources,
            "estimate": self.estimate,
        }

    def run(self, rc: RunConfig) -> int:
        logger.info(f"Running {rc.command}")
        try:
            result = self._commands[rc.command](rc)
            payload = {"command": rc.command, "run": rc.to_dict(), "result": result.payload,
                       "flagged": result.flagged}
            self._emit(rc, payload, result.rows)
        except ScreeningError as e:
            logger.error(f"{rc.command} failed: {e}")
            self._report(rc.command, e.to_dict())
            return e.exit_code
        except OSError as e:
            logger.error(f"{rc.command} I/O failure: {e}")
            self._report(rc.command, {"error": type(e).__name__, "message": str(e)})
            return EXIT_IO
        except (ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
            logger.error(f"{rc.command} numerical failure: {e}")
            self._report(rc.command, {"error": type(e).__name__, "message": str(e)})
            return EXIT_OTHER
        if result.flagged:
            logger.warning(f"{rc.command} finished with flagged results")
            return EXIT_FLAGGED
        logger.info(f"{rc.command} finished")
        return EXIT_OK

    def _report(self, command: str, error: Dict[str, Any]) -> None:
        error = dict(error, command=command)
        self.stderr.write(json.dumps(error, sort_keys=True) + "\n")

    def _emit(self, rc: RunConfig, payload: Dict[str, Any], rows: List[Dict[str, Any]]) -> None:
        if rc.output:
            self.exporter.export(payload, rows, rc.output, metadata={"command": rc.command})
        if rc.print_json or not rc.output:
            self.stdout.write(self.exporter.payload_json(payload))

    # ---- loading ----

    def _load_integrals(self, rc: RunConfig) -> LoadedIntegrals:
        if not rc.inputs:
            raise ValidationError(f"{rc.command} needs an integral file")
        loaded = load_hamiltonian(rc.inputs[0], tol=self.config["input_symmetry_tol"])
        if rc.solvent:
            solvent = load_solvent(rc.solvent, tol=self.config["input_symmetry_tol"])
            loaded = dataclasses.replace(loaded, hamiltonian=apply_solvent(loaded.hamiltonian, solvent))
            logger.info(f"Applied {solvent.kind} solvent from {rc.solvent}")
        return loaded

    def _dense_system(self, rc: RunConfig) -> Tuple[DenseSystem, float, Optional[float]]:
        """Dense system with its identity shift E_id and, for integral input, the CDF 1-norm.

        Dense JSON systems carry no LCU, so E_id is their mean eigenvalue tr(H)/dim.
        """
        if not rc.inputs:
            raise ValidationError(f"{rc.command} needs an input file")
        path = Path(rc.inputs[0])
        if path.suffix.lower() == ".json":
            try:
                is_dense = "hamiltonian" in json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as e:
                raise IntegralFormatError(f"{path}: malformed JSON ({e})") from e
            if is_dense:
                if rc.solvent:
                    raise ValidationError("solvent corrections apply to integral files, not dense systems")
                system = load_dense_system(path, tol=self.config["input_symmetry_tol"])
                h = system.hamiltonian
                return system, float(np.trace(h).real) / h.shape[0], None
        loaded = self._load_integrals(rc)
        h = loaded.hamiltonian
        cdf = cdf_factorize(h, float(rc.options.get("threshold") or 1e-8), max_iter=int(self.config["cdf_max_iter"]))
        system = many_body_system(loaded, mode_cap=self.config["fock_mode_cap"], dense_cap=self.config["dense_cap"])
        return system, identity_shift(cdf, h.e_core), one_norm(cdf)

    def _window(self, rc: RunConfig, energies: np.ndarray, delta: float, lam: Optional[float] = None) -> SpectralWindow:
        """Excitation window above the ground energy, in the frame where the identity term is removed.

        The normalization is the larger of the LCU 1-norm and the spectral bound of that frame.
        """
        if rc.window is None:
            raise ValidationError(f"{rc.command} needs --window")
        e0 = float(energies[0])
        e_hi = e0 + rc.window[1]
        e_max = max(float(energies[-1]), e_hi)
        bound = max(abs(e0), abs(e_max))
        return SpectralWindow(e_lo=e0 + rc.window[0], e_hi=e_hi, e_min=e0, e_max=e_max, delta=delta,
                              lam=bound if lam is None else max(lam, bound))

    # ---- commands ----

    def factorize(self, rc: RunConfig) -> CommandResult:
        h = self._load_integrals(rc).hamiltonian
        opts = rc.options
        method = opts.get("method", "cdf")
        threshold = float(opts.get("threshold", 1e-6))
        if method == "thc":
            one_body = pauli_one_body(h)
            f = thc_factorize(h, threshold, max_rank=opts.get("max_rank"),
                              max_iter=int(self.config["thc_max_iter"]), seed=int(rc.seed or 0))
            size = {"rank": f.rank}
        elif method == "cdf":
            one_body = None
            f = cdf_factorize(h, threshold, max_fragments=opts.get("max_rank"),
                              max_iter=int(self.config["cdf_max_iter"]), refine=bool(opts.get("refine", False)))
            size = {"n_frag": f.n_frag}
        else:
            raise ValidationError(f"unknown factorization method {method!r}")
        lam = one_norm(f, one_body)
        e_id = identity_shift(f, h.e_core, one_body)
        if not f.converged:
            logger.warning(f"{method} factorization stopped at error {f.frob_error:.3e} above {threshold:g}")
        row = {"method": method, "n_orb": h.n_orb, **size, "frob_error": f.frob_error, "threshold": threshold,
               "lambda": lam, "e_id": e_id, "converged": f.converged}
        payload = {"factorization": f.to_dict(), "lambda": lam, "e_id": e_id,
                   "formulas": {"lambda": f"lambda_{method.upper()}", "e_id": "E_id"}}
        return CommandResult(payload, [row], flagged=not f.converged)

    def fit_degree(self, rc: RunConfig) -> CommandResult:
        xs = parse_range(rc.options.get("range", "50:2000:6"))
        table = degree_table(xs, eps_h=rc.eps_h, synthesize=bool(rc.options.get("synthesize", False)),
                             grid_points=int(self.config["filter_grid_points"]),
                             max_degree=int(self.config["filter_max_degree"]))
        table["formulas"] = {"fit_degree": "d_fit"}
        return CommandResult(table, table["rows"])

    def simulate_window(self, rc: RunConfig) -> CommandResult:
        cfg = self.config
        system, e_id, lam = self._dense_system(rc)
        h = system.hamiltonian - e_id * np.eye(system.hamiltonian.shape[0])
        energies = scipy.linalg.eigvalsh(h)
        delta = float(rc.options.get("delta") or cfg["delta_ha"])
        window = self._window(rc, energies, delta, lam)
        dipole = system.dipole if len(system.dipole) > 1 else system.dipole[0]
        a_window, p_window = exact_window_absorption(h, dipole, window, cfg["dense_cap"], cfg["degeneracy_tol"])
        filters = None
        if not rc.options.get("ideal_filters", False):
            filters = build_window_filters(window, rc.eps_h, int(cfg["filter_grid_points"]),
                                           int(cfg["filter_max_degree"]))
        plan = build_sampling_plan(rc.eps_samp, rc.delta_samp)
        estimate = simulate_shots(h, dipole, window, filters, plan, int(rc.seed),
                                  shots=rc.options.get("shots"), shot_chunk=int(cfg["shot_chunk"]),
                                  dense_cap=cfg["dense_cap"], degeneracy_tol=cfg["degeneracy_tol"])
        payload = {
            "exact": estimate.exact,
            "estimate": estimate.estimate,
            "interval": list(estimate.interval),
            "half_width": estimate.half_width,
            "shots": estimate.shots,
            "filter_degrees": list(estimate.filter_degrees),
            "a_window": a_window,
            "p_window": p_window,
            "sampling": estimate.to_dict(),
            "plan": plan.to_dict(),
            "window": dict(window.to_dict(), identity_shift=e_id, ground_energy=float(energies[0]) + e_id),
            "formulas": {"a_window": "A_window", "p_window": "P_window", "estimate": "P_window;double_measurement",
                         "plan": "S_dm", "window": "E - E_id"},
        }
        row = {"a_window": a_window, "p_window": p_window, "estimate": estimate.estimate,
               "half_width": estimate.half_width, "shots": estimate.shots, "seed": estimate.seed}
        return CommandResult(payload, [row], flagged=estimate.flagged)

    def isc_proxy(self, rc: RunConfig) -> CommandResult:
        cfg = self.config
        loaded = self._load_integrals(rc)
        h = loaded.hamiltonian
        opts = rc.options
        if opts.get("soc"):
            soc = load_hamiltonian(opts["soc"], tol=cfg["input_symmetry_tol"]).soc
            if soc is None:
                raise IntegralFormatError(f"{opts['soc']} has no spin-orbit section")
            if soc.h_soc.shape[0] != 2 * h.n_orb:
                raise ValidationError(f"SOC file covers {soc.h_soc.shape[0]} spin orbitals, "
                                      f"integrals have {2 * h.n_orb}")
            loaded = dataclasses.replace(loaded, soc=soc)
        if loaded.soc is None:
            raise IntegralFormatError("no spin-orbit integrals; give --soc or an integral file with SOC sections")
        space = FockSpace(2 * h.n_orb, mode_cap=int(cfg["fock_mode_cap"]))
        h_many = molecular_hamiltonian(h, space).toarray()
        s_z, s2 = spin_operators(h.n_orb, space)
        m = int(opts.get("m", 0))
        singlet, triplet = reference_states(h_many, s2, s_z, m=m, singlet_root=int(opts.get("singlet_root", 1)),
                                            number=space.particle_number(), n_elec=h.n_elec,
                                            dense_cap=int(cfg["dense_cap"]))
        channel = opts.get("channel", "total")
        h_soc = np.asarray(loaded.soc.h_soc) if channel == "total" else channel_operator(loaded.soc, channel)
        grid = parse_time_grid(opts.get("times", "1e-3:1e-1:8"))
        results, limit = proxy_series(singlet, triplet, h_soc, grid, space)
        rates = [r.proxy_rate for r in results]
        slope = log_log_slope(grid, rates) if min(rates) > 0 else float("nan")
        rows = [r.to_dict() for r in results]

        readouts = []
        if opts.get("hadamard", False):
            amplitude = math.sqrt(float(cfg["gamma_had"]))
            shots = int(cfg["s_had"]) if rc.seed is not None else None
            for k, t in enumerate(grid):
                readout = modified_hadamard(singlet, triplet, h_soc, float(t), amplitude, amplitude, shots=shots,
                                            seed=None if rc.seed is None else int(rc.seed) + k, space=space)
                readouts.append(dict(readout.to_dict(), t=float(t)))
        payload = {"channel": channel, "m": m, "series": rows, "limit": limit, "log_log_slope": slope,
                   "hadamard": readouts,
                   "formulas": {"series": "k_ISC_proxy", "limit": "k_ISC_proxy/t^2", "hadamard": "x_exp,y_exp"}}
        return CommandResult(payload, rows)

    def trotter_audit(self, rc: RunConfig) -> CommandResult:
        cfg = self.config
        h = self._load_integrals(rc).hamiltonian
        cdf = cdf_factorize(h, float(rc.options.get("threshold", 1e-8)), max_iter=int(cfg["cdf_max_iter"]))
        mode_cap = int(cfg["y3_mode_cap"])
        e_id = identity_shift(cdf, h.e_core)
        c_exact = y3_norm_exact(cdf, mode_cap)
        c_heuristic = y3_norm_heuristic(cdf)
        steps = parse_float_list(rc.options.get("steps", "0.4,0.2,0.1,0.05"))
        reports = [verify_bias(cdf, step, e_id=e_id, c_exact=c_exact, mode_cap=mode_cap,
                               branch_cut_margin=cfg["branch_cut_margin"], bias_rtol=cfg["bias_rtol"])
                   for step in steps]
        positive = [(r.delta, r.max_bias) for r in reports if r.max_bias > 0]
        order = log_log_slope(*zip(*positive)) if len(positive) >= 2 else float("nan")

        budgets, taus = {}, {"L": None, "R": None}
        window_info = None
        if rc.window is not None:
            # fragment sum carries no identity term
            energies = scipy.linalg.eigvalsh(TrotterPropagator(cdf, mode_cap=mode_cap).hamiltonian_matrix())
            window = self._window(rc, energies, float(rc.options.get("delta") or cfg["delta_ha"]), one_norm(cdf))
            window_info = dict(window.to_dict(), identity_shift=e_id)
            for side in ("L", "R"):
                rescaled = pad_and_rescale(window, side)
                taus[side] = rescaled.tau
                budgets[side] = delta_max(c_exact, rc.xi, window.e_hi - window.e_lo, rescaled.tau,
                                          cfg["trotter_max_step"]).to_dict()
        flagged = not all(r.bound_holds for r in reports)
        rows = [{"delta": r.delta, "max_bias": r.max_bias, "bound": r.bound, "bound_holds": r.bound_holds,
                 "excluded": r.excluded} for r in reports]
        payload = {"c_exact": c_exact, "c_heuristic": c_heuristic, "tau_L": taus["L"], "tau_R": taus["R"],
                   "delta_max": min(b["delta_max"] for b in budgets.values()) if budgets else None,
                   "measured_max_bias": max((r.max_bias for r in reports), default=0.0),
                   "n_frag": cdf.n_frag, "e_id": e_id, "heuristic_dominates": c_heuristic >= c_exact,
                   "convergence_order": order, "reports": [r.to_dict() for r in reports], "budgets": budgets,
                   "window": window_info,
                   "formulas": {"c_exact": "||Y3||", "reports": "c tau^2 Delta^2", "budgets": "Delta_max",
                                "tau_L": "2 pi / Lambda_L", "tau_R": "2 pi / Lambda_R"}}
        return CommandResult(payload, rows, flagged=flagged)

    def vibronic_run(self, rc: RunConfig) -> CommandResult:
        cfg = self.config
        if not rc.inputs:
            raise ValidationError("vibronic-run needs a model file")
        opts = rc.options
        grid = VibronicGrid(load_vibronic_model(rc.inputs[0]), dim_cap=int(cfg["vibronic_dim_cap"]))
        psi0 = grid.product_state(int(opts.get("initial_state", 0)))
        trace = propagate(grid, psi0, float(opts.get("dt", 0.05)), int(opts.get("steps", 200)),
                          record_every=int(opts.get("record_every", 1)), norm_drift_tol=cfg["norm_drift_tol"])
        fit_window = opts.get("fit_window")
        rate = extract_rate(trace, tuple(parse_float_list(fit_window)) if fit_window else None)
        rows = [{"t": float(t), "p_t": float(p)} for t, p in zip(trace.times, trace.p_t)]
        payload = {"trace": trace.to_dict(), "rate": rate.to_dict(),
                   "formulas": {"trace": "P_T(t)", "rate": "k_ISC_vib"}}
        return CommandResult(payload, rows, flagged=rate.flagged)

    def vibronic_resources(self, rc: RunConfig) -> CommandResult:
        opts = rc.options
        estimate = vibronic_resources(int(opts.get("n_el", 5)), int(opts.get("m_modes", 19)),
                                      int(opts.get("grid_k", 128)), int(opts.get("degree", 2)),
                                      float(opts.get("n_steps", 3.7e5)), c_tof=self.config["vibronic_c_tof"],
                                      c_anc=self.config["vibronic_c_anc"])
        return CommandResult({"estimates": [estimate.to_dict()]}, [estimate.to_row()])

    def estimate(self, rc: RunConfig) -> CommandResult:
        if not rc.preset:
            raise ValidationError("estimate needs --preset")
        preset = resource_manager.load_preset(rc.preset)
        if preset is None:
            raise FileNotFoundError(f"preset {rc.preset!r} not found")
        family = rc.options.get("family", "absorption")
        overrides = dict(self.config, eps_h=rc.eps_h, eps_samp=rc.eps_samp, delta_samp=rc.delta_samp)
        if rc.options.get("batch_b"):
            overrides["batch_b"] = int(rc.options["batch_b"])
        preset = dict(preset, xi=rc.xi)
        estimates = preset_table(preset, family, overrides)
        payload = {"preset": preset.get("name", rc.preset), "family": family,
                   "estimates": [e.to_dict() for e in estimates]}
        return CommandResult(payload, [e.to_row() for e in estimates])
