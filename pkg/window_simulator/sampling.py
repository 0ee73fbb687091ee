"""
Shot-level simulation of threshold projection with double measurement
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from models.errors import DomainError
from models.spectral import FilterPolynomial, SamplingPlan, SpectralWindow, WindowEstimate
from qsp_filter.heaviside import window_response_array
from window_simulator.absorption import DipoleInput, dipole_state, window_mass

logger = logging.getLogger(__name__)


def build_sampling_plan(eps_samp: float, delta_samp: float) -> SamplingPlan:
    """S = ceil(ln(2/delta) / (2 eps^2)) and S_dm = ceil(S/2)"""
    if not 0.0 < eps_samp < 1.0:
        raise DomainError(f"eps_samp must lie in (0, 1), got {eps_samp}")
    if not 0.0 < delta_samp < 1.0:
        raise DomainError(f"delta_samp must lie in (0, 1), got {delta_samp}")
    s = math.ceil(math.log(2.0 / delta_samp) / (2.0 * eps_samp ** 2))
    return SamplingPlan(eps_samp=eps_samp, delta_samp=delta_samp, s=s, s_dm=math.ceil(s / 2))


def hoeffding_half_width(n_samples: int, delta: float) -> float:
    if n_samples <= 0:
        raise DomainError("Hoeffding interval needs at least one sample")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n_samples))


def _chunk_sum(rng: np.random.Generator, weights: np.ndarray, response: np.ndarray,
               p_filtered: float, shots: int) -> float:
    """Sum of 2 * shots Bernoulli outcomes from one seeded chunk"""
    f = rng.choice(weights.size, size=shots, p=weights)
    first = rng.random(shots) < response[f]
    # the overlap test succeeds with P if the ancillas flagged the window, else with 1 - P
    success = rng.random(shots) < np.where(first, p_filtered, 1.0 - p_filtered)
    second = np.where(first, success, ~success)
    return float(first.sum() + second.sum())


def simulate_shots(h_dense: np.ndarray, d_dense: DipoleInput, window: SpectralWindow,
                   filters: Optional[Tuple[FilterPolynomial, FilterPolynomial]], plan: SamplingPlan,
                   seed: int, shots: Optional[int] = None, shot_chunk: int = 1024,
                   dense_cap: int = 4096, degeneracy_tol: float = 1e-10) -> WindowEstimate:
    """Monte-Carlo estimate of the window probability.

    `filters=None` replaces the step filters by exact window indicators.
    Shot chunk c draws from default_rng(SeedSequence(seed).spawn(n)[c]);
    chunk sums are combined with math.fsum.
    """
    n_shots = plan.s_dm if shots is None else shots
    if n_shots <= 0:
        raise DomainError("sampling plan has no double-measurement shots")
    state = dipole_state(h_dense, d_dense, dense_cap, degeneracy_tol)
    exact = window_mass(state, window) if state.norm_d > 0 else 0.0
    flagged = state.ground_degenerate

    if filters is None:
        response = ((state.energies >= window.e_lo) & (state.energies <= window.e_hi)).astype(float)
        degrees = []
    else:
        response, outside = window_response_array(filters[0], filters[1], state.energies, window)
        response = np.clip(response, 0.0, 1.0)
        degrees = [filters[0].degree, filters[1].degree]
        if np.any(outside & (state.weights > 0)):
            logger.warning("populated eigenstates lie outside the certified filter domain")
            flagged = True

    weights = state.weights.copy()
    if state.norm_d == 0.0:
        weights = np.zeros_like(weights)
        weights[0] = 1.0
        response = np.zeros_like(response)
    weights = weights / weights.sum()
    p_filtered = float(np.clip(np.dot(weights, response), 0.0, 1.0))

    chunks = [shot_chunk] * (n_shots // shot_chunk)
    if n_shots % shot_chunk:
        chunks.append(n_shots % shot_chunk)
    children = np.random.SeedSequence(seed).spawn(len(chunks))
    sums = [_chunk_sum(np.random.default_rng(child), weights, response, p_filtered, size)
            for child, size in zip(children, chunks)]

    n_samples = 2 * n_shots
    estimate = math.fsum(sums) / n_samples
    half_width = hoeffding_half_width(n_samples, plan.delta_samp)
    logger.info(f"Window estimate {estimate:.4f} +- {half_width:.4f} from {n_shots} shots "
                f"(exact {exact:.4f}, filtered {p_filtered:.4f})")
    return WindowEstimate(estimate=estimate, interval=[max(0.0, estimate - half_width), min(1.0, estimate + half_width)],
                          half_width=half_width, n_samples=n_samples, shots=n_shots, seed=seed,
                          filtered_probability=p_filtered, exact=exact, filter_degrees=degrees, flagged=flagged)
