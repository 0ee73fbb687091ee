"""
Single-sided spectral projection below an energy cut
"""

import logging
from typing import Optional

import numpy as np

from models.dynamics import ProjectionResult
from models.errors import DomainError
from models.spectral import LEFT_STEP, FilterPolynomial
from window_simulator.absorption import spectral_decomposition

logger = logging.getLogger(__name__)


def single_sided_projection(state: np.ndarray, h_dense: np.ndarray, e_cut: float, filt: FilterPolynomial,
                            lam: Optional[float] = None, success_floor: float = 1e-6,
                            dense_cap: int = 4096) -> ProjectionResult:
    """Reweight eigen-amplitudes by pL((E - e_cut)/lambda') and renormalize.

    lambda' = lam + |e_cut| with lam defaulting to the spectral radius of h_dense.
    """
    if filt.orientation != LEFT_STEP:
        raise DomainError("single-sided projection needs a left-step filter")
    spectrum = spectral_decomposition(h_dense, dense_cap)
    energies = spectrum.energies
    if not energies[0] <= e_cut <= energies[-1]:
        raise DomainError(f"cut {e_cut} lies outside the spectral support [{energies[0]}, {energies[-1]}]")
    lam = float(np.max(np.abs(energies))) if lam is None else lam
    lambda_prime = lam + abs(e_cut)
    amplitudes = spectrum.vectors.conj().T @ np.asarray(state, dtype=complex)
    amplitudes = amplitudes * filt((energies - e_cut) / lambda_prime)
    success = float(np.vdot(amplitudes, amplitudes).real)
    flagged = success < success_floor
    if flagged:
        logger.warning(f"projection success probability {success:.3e} below floor {success_floor:g}")
    projected = spectrum.vectors @ amplitudes
    if success > 0:
        projected = projected / np.sqrt(success)
    return ProjectionResult(state=projected, success_prob=success, flagged=flagged)
