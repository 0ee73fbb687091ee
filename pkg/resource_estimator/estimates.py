"""
End-to-end logical cost estimates.

Families and the formula each breakdown item evaluates:

    threshold_projection  C_TP     = C_SoS(D) + 2 d G                     shots S_dm
    evolution_proxy       C_ev-pr  = 4 [(C_SoS(2D) + d G) / gamma^2 + C_HSOC]   shots S_Had
    trotter_qpe           C_TP;Trotter = K [C_SoS(D) + 2 d C_step]     shots S_dm
    trotter_isc           C_ev-pr with the projector built from Trotter steps

G is the walk cost of resource_estimator.walk_cost; K_side is the number of
Trotter steps per unit of rescaled evolution, ceil(1 / Delta_max), and
K = max(K_L, K_R) so both projectors and the state preparation repeat per step.
"""

import logging
import math
from typing import Dict, Optional

from models.errors import CapacityError, DomainError
from models.factorization import CdfFactorization
from models.resources import PrecisionBits, ResourceEstimate
from models.spectral import SpectralWindow
from qsp_filter.degree_fit import fit_degree
from qsp_filter.heaviside import synthesize_heaviside
from resource_estimator.walk_cost import precision_bits, sos_cost, walk_cost
from trotter_engine.error_bounds import delta_max, y3_norm_exact, y3_norm_heuristic
from trotter_engine.rescaling import pad_and_rescale
from window_simulator.sampling import build_sampling_plan

logger = logging.getLogger(__name__)

DEGREE_SOURCES = ("fit", "synthesized")


def filter_degree(lambda_prime: float, delta: float, eps_h: float = 0.01, source: str = "fit") -> int:
    """Filter degree at x = lambda'/Delta, from the affine law or a certified synthesis"""
    if delta <= 0 or lambda_prime <= 0:
        raise DomainError("lambda' and Delta must be positive")
    if source == "fit":
        return fit_degree(lambda_prime / delta)
    if source == "synthesized":
        return synthesize_heaviside(delta / lambda_prime, eps_h).degree
    raise DomainError(f"degree source must be one of {DEGREE_SOURCES}, got {source!r}")


def _common_parameters(n_orb: int, bits: PrecisionBits, lambda_prime: float, degree: int, d_dets: int,
                       formula: str) -> Dict:
    return {"n_orb": n_orb, "lambda_prime": lambda_prime, "degree": degree, "aleph": bits.aleph,
            "beth": bits.beth, "d_dets": d_dets, "cost_formula": formula}


def threshold_projection_estimate(n_orb: int, m_rank: int, lambda_prime: float, delta: float,
                                  eps_h: float = 0.01, eps_samp: float = 0.1, delta_samp: float = 0.01,
                                  d_dets: int = 10000, batch_b: int = 1, eps_coeff: float = 1.6e-4,
                                  eps_rot: float = 1.6e-4, degree_source: str = "fit",
                                  walk_constants: Optional[Dict[str, int]] = None) -> ResourceEstimate:
    bits = precision_bits(lambda_prime, eps_coeff, eps_rot, n_orb)
    walk = walk_cost(m_rank, n_orb, bits, batch_b, walk_constants)
    degree = filter_degree(lambda_prime, delta, eps_h, degree_source)
    plan = build_sampling_plan(eps_samp, delta_samp)
    c_sos, n_sos = sos_cost(d_dets)

    projector = degree * walk.g_toffoli
    breakdown = {"state_prep": c_sos, "projector_L": projector, "projector_R": projector}
    parameters = _common_parameters(n_orb, bits, lambda_prime, degree, d_dets, "C_TP")
    parameters.update({"m_rank": m_rank, "delta": delta, "eps_h": eps_h, "degree_source": degree_source,
                       "S": plan.s, "S_dm": plan.s_dm, "n_sos": n_sos})
    parameters.update(walk.to_dict())
    estimate = ResourceEstimate(
        family="threshold_projection",
        logical_qubits=2 * n_orb + max(n_sos, walk.n_aux + 3),
        toffoli_per_shot=sum(breakdown.values()),
        shots=plan.s_dm,
        breakdown=breakdown,
        formulas={"state_prep": "C_SoS(D)", "projector_L": "C_proj", "projector_R": "C_proj"},
        parameters=parameters,
    )
    logger.info(f"Threshold projection N={n_orb}, M={m_rank}: d={degree}, G={walk.g_toffoli}, "
                f"{estimate.logical_qubits} qubits, {estimate.toffoli_per_shot:.3e} Toffoli/shot x {plan.s_dm}")
    return estimate


def soc_evolution_cost(n_orb: int, beth: int) -> int:
    """Fast-forwarded SOC step: U0 and its inverse as Givens networks on 2N spin orbitals plus 2N phases"""
    n_so = 2 * n_orb
    return (2 * n_so * (n_so - 1) + n_so) * (beth - 2)


def _evolution_breakdown(c_sos_2d: int, c_proj: int, c_hsoc: int, gamma: float) -> Dict[str, int]:
    return {
        "state_prep": math.ceil(4.0 * c_sos_2d / gamma ** 2),
        "projector": math.ceil(4.0 * c_proj / gamma ** 2),
        "soc_evolution": 4 * c_hsoc,
    }


def _check_gamma(gamma: float, s_had: int) -> None:
    if not 0.0 < gamma <= 1.0:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    if s_had < 1:
        raise DomainError(f"S_Had must be >= 1, got {s_had}")


def evolution_proxy_estimate(n_orb: int, m_rank: int, lambda_prime: float, delta: float,
                             gamma: float = 0.7, s_had: int = 483, t: Optional[float] = None,
                             eps_h: float = 0.01, d_dets: int = 10000, batch_b: int = 1,
                             c_hsoc: Optional[int] = None, eps_coeff: float = 1.6e-4, eps_rot: float = 1.6e-4,
                             degree_source: str = "fit",
                             walk_constants: Optional[Dict[str, int]] = None) -> ResourceEstimate:
    """Modified Hadamard test on a projected singlet; the SOC step itself is fast-forwarded"""
    _check_gamma(gamma, s_had)
    bits = precision_bits(lambda_prime, eps_coeff, eps_rot, n_orb)
    walk = walk_cost(m_rank, n_orb, bits, batch_b, walk_constants)
    degree = filter_degree(lambda_prime, delta, eps_h, degree_source)
    c_sos_2d, n_sos_2d = sos_cost(2 * d_dets)
    c_proj = degree * walk.g_toffoli
    c_hsoc = soc_evolution_cost(n_orb, bits.beth) if c_hsoc is None else int(c_hsoc)
    if c_hsoc < 0:
        raise DomainError(f"C_HSOC override must be non-negative, got {c_hsoc}")

    breakdown = _evolution_breakdown(c_sos_2d, c_proj, c_hsoc, gamma)
    parameters = _common_parameters(n_orb, bits, lambda_prime, degree, d_dets, "C_ev-pr")
    parameters.update({"m_rank": m_rank, "delta": delta, "gamma": gamma, "S_Had": s_had, "c_hsoc": c_hsoc,
                       "n_sos": n_sos_2d, "degree_source": degree_source})
    if t is not None:
        parameters["t"] = t
    parameters.update(walk.to_dict())
    estimate = ResourceEstimate(
        family="evolution_proxy",
        logical_qubits=2 * n_orb + max(n_sos_2d, walk.n_aux + 2),
        toffoli_per_shot=sum(breakdown.values()),
        shots=s_had,
        breakdown=breakdown,
        formulas={"state_prep": "C_SoS(2D)", "projector": "C_proj", "soc_evolution": "C_HSOC"},
        parameters=parameters,
    )
    logger.info(f"Evolution proxy N={n_orb}: gamma={gamma}, {estimate.logical_qubits} qubits, "
                f"{estimate.total_toffoli:.3e} Toffoli over {s_had} shots")
    return estimate


def trotter_step_cost(n_orb: int, n_frag: int, beth: int) -> int:
    """One symmetric step: 2(L+1) - 1 fragment exponentials, each a 2N-Givens basis change plus diagonal phases"""
    n_so = 2 * n_orb
    givens = n_so * 2 * (beth - 2)
    phases = n_so * (n_so + 1) // 2 * (beth - 2)
    return (2 * (n_frag + 1) - 1) * (givens + phases)


def _steps(budget_delta: float) -> int:
    # tolerate 1/x rounding just above an integer
    return max(1, math.ceil(1.0 / budget_delta - 1e-9))


def _trotter_plan(cdf: CdfFactorization, window: SpectralWindow, xi: float, c: Optional[float],
                  eps_coeff: float, eps_rot: float, max_step: float, y3_mode_cap: int) -> Dict:
    if c is None:
        try:
            c = y3_norm_exact(cdf, y3_mode_cap)
        except CapacityError:
            c = y3_norm_heuristic(cdf)
    bin_width = window.e_hi - window.e_lo
    sides = {}
    for side in ("L", "R"):
        rescaled = pad_and_rescale(window, side)
        budget = delta_max(c, xi, bin_width, rescaled.tau, max_step)
        sides[side] = (rescaled, budget, _steps(budget.delta_max))
    lambda_prime = max(s[0].lambda_pad for s in sides.values()) / 2.0
    bits = precision_bits(lambda_prime, eps_coeff, eps_rot, cdf.n_orb)
    return {"c": c, "sides": sides, "lambda_prime": lambda_prime, "bits": bits,
            "c_step": trotter_step_cost(cdf.n_orb, cdf.n_frag, bits.beth)}


def _trotter_parameters(cdf: CdfFactorization, plan: Dict, degree: int, d_dets: int, xi: float, formula: str) -> Dict:
    parameters = _common_parameters(cdf.n_orb, plan["bits"], plan["lambda_prime"], degree, d_dets, formula)
    parameters.update({"n_frag": cdf.n_frag, "xi": xi, "c": plan["c"], "c_step": plan["c_step"]})
    for side, (rescaled, budget, steps) in plan["sides"].items():
        parameters[f"lambda_pad_{side}"] = rescaled.lambda_pad
        parameters[f"delta_max_{side}"] = budget.delta_max
        parameters[f"steps_{side}"] = steps
        parameters[f"capped_{side}"] = budget.capped
    return parameters


def trotter_qpe_estimate(cdf: CdfFactorization, window: SpectralWindow, xi: float = 0.1, d_dets: int = 10000,
                         degree: Optional[int] = None, eps_h: float = 0.01, eps_samp: float = 0.1,
                         delta_samp: float = 0.01, eps_coeff: float = 1.6e-4, eps_rot: float = 1.6e-4,
                         c: Optional[float] = None, max_step: float = 1.0, y3_mode_cap: int = 10,
                         degree_source: str = "fit") -> ResourceEstimate:
    """Threshold projection with both filters realized by Trotterized controlled evolutions"""
    plan = _trotter_plan(cdf, window, xi, c, eps_coeff, eps_rot, max_step, y3_mode_cap)
    if degree is None:
        degree = filter_degree(plan["lambda_prime"], window.delta, eps_h, degree_source)
    sampling = build_sampling_plan(eps_samp, delta_samp)
    c_sos, n_sos = sos_cost(d_dets)
    sides = plan["sides"]
    k_steps = max(sides["L"][2], sides["R"][2])
    breakdown = {
        "state_prep": k_steps * c_sos,
        "projector_L": k_steps * degree * plan["c_step"],
        "projector_R": k_steps * degree * plan["c_step"],
    }
    parameters = _trotter_parameters(cdf, plan, degree, d_dets, xi, "C_TP;Trotter")
    parameters.update({"S": sampling.s, "S_dm": sampling.s_dm, "n_sos": n_sos, "K": k_steps})
    estimate = ResourceEstimate(
        family="trotter_qpe",
        logical_qubits=2 * cdf.n_orb + max(n_sos, plan["bits"].beth + 3),
        toffoli_per_shot=sum(breakdown.values()),
        shots=sampling.s_dm,
        breakdown=breakdown,
        formulas={"state_prep": "K C_SoS(D)", "projector_L": "K d C_step", "projector_R": "K d C_step"},
        parameters=parameters,
    )
    logger.info(f"Trotter QPE N={cdf.n_orb}, L={cdf.n_frag}: steps {sides['L'][2]}/{sides['R'][2]}, "
                f"{estimate.logical_qubits} qubits, {estimate.toffoli_per_shot:.3e} Toffoli/shot")
    return estimate


def trotter_isc_estimate(cdf: CdfFactorization, window: SpectralWindow, xi: float = 0.1, gamma: float = 0.7,
                         s_had: int = 483, d_dets: int = 10000, degree: Optional[int] = None, eps_h: float = 0.01,
                         c_hsoc: Optional[int] = None, eps_coeff: float = 1.6e-4, eps_rot: float = 1.6e-4,
                         c: Optional[float] = None, max_step: float = 1.0, y3_mode_cap: int = 10,
                         degree_source: str = "fit") -> ResourceEstimate:
    """Evolution proxy whose single-sided projector is built from Trotter steps"""
    _check_gamma(gamma, s_had)
    plan = _trotter_plan(cdf, window, xi, c, eps_coeff, eps_rot, max_step, y3_mode_cap)
    if degree is None:
        degree = filter_degree(plan["lambda_prime"], window.delta, eps_h, degree_source)
    beth = plan["bits"].beth
    c_sos_2d, n_sos_2d = sos_cost(2 * d_dets)
    c_proj = degree * plan["sides"]["L"][2] * plan["c_step"]
    c_hsoc = soc_evolution_cost(cdf.n_orb, beth) if c_hsoc is None else int(c_hsoc)
    if c_hsoc < 0:
        raise DomainError(f"C_HSOC override must be non-negative, got {c_hsoc}")

    breakdown = _evolution_breakdown(c_sos_2d, c_proj, c_hsoc, gamma)
    parameters = _trotter_parameters(cdf, plan, degree, d_dets, xi, "C_ev-pr")
    parameters.update({"gamma": gamma, "S_Had": s_had, "c_hsoc": c_hsoc, "n_sos": n_sos_2d})
    estimate = ResourceEstimate(
        family="trotter_isc",
        logical_qubits=2 * cdf.n_orb + max(n_sos_2d, beth + 8),
        toffoli_per_shot=sum(breakdown.values()),
        shots=s_had,
        breakdown=breakdown,
        formulas={"state_prep": "C_SoS(2D)", "projector": "C_TP;Trotter", "soc_evolution": "C_HSOC"},
        parameters=parameters,
    )
    logger.info(f"Trotter ISC N={cdf.n_orb}: {estimate.logical_qubits} qubits, "
                f"{estimate.total_toffoli:.3e} Toffoli over {s_had} shots")
    return estimate
