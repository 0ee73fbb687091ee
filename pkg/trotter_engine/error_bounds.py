"""
Leading error operator of the symmetric product formula, step-size budget and bias audit.

The one-step unitary is e^{-i delta (H + delta^2 Y3 + O(delta^4))} with

    Y3 = sum_j [ 1/12 [S_j, [H_j, S_j]] + 1/24 [H_j, [H_j, S_j]] ],  S_j = sum_{h>j} H_h

After rescaling by tau the eigenvalue bias in energy units is bounded by
c tau^2 delta^2 with c = ||Y3||. Fragment 0 is the outermost factor of the
step, so each fragment pairs with the sum of the fragments applied inside it.
"""

import logging
import math
from typing import List, Optional

import numpy as np
import scipy.linalg

from models.dynamics import BiasReport, RescaledHamiltonian, TrotterBudget
from models.errors import CapacityError, DomainError
from models.factorization import CdfFactorization
from trotter_engine.product_formula import TrotterPropagator, cdf_fragments

logger = logging.getLogger(__name__)


def _commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def y3_operator(fragments: List[np.ndarray]) -> np.ndarray:
    dim = fragments[0].shape[0]
    y3 = np.zeros((dim, dim), dtype=complex)
    partial = np.zeros((dim, dim), dtype=complex)
    for h_j in reversed(fragments):
        inner = _commutator(h_j, partial)
        y3 += _commutator(partial, inner) / 12.0 + _commutator(h_j, inner) / 24.0
        partial = partial + h_j
    return y3


def y3_norm_exact(cdf: CdfFactorization, mode_cap: int = 10) -> float:
    """Spectral norm of Y3 built from dense lifted fragments"""
    if 2 * cdf.n_orb > mode_cap:
        raise CapacityError(f"{2 * cdf.n_orb} spin orbitals exceed the dense Y3 cap of {mode_cap}; use the heuristic")
    prop = TrotterPropagator(cdf, mode_cap=mode_cap)
    y3 = y3_operator([prop.fragment_matrix(j) for j in range(len(prop.fragments))])
    y3 = 0.5 * (y3 + y3.conj().T)
    norm = float(np.max(np.abs(scipy.linalg.eigvalsh(y3))))
    logger.debug(f"Exact ||Y3|| = {norm:.6e}")
    return norm


def y3_norm_heuristic(cdf: CdfFactorization) -> float:
    """Triangle-inequality bound with ||[A, B]|| <= 2 ||A|| ||B|| and fragment 1-norms"""
    total = 0.0
    partial = 0.0
    for frag in reversed(cdf_fragments(cdf)):
        norm = frag.one_norm()
        total += partial ** 2 * norm / 3.0 + norm ** 2 * partial / 6.0
        partial += norm
    return total


def delta_max(c: float, xi: float, delta_e_bin: float, tau: float, max_step: float = 1.0) -> TrotterBudget:
    """sqrt(xi * dE_bin / (c tau^2)); c = 0 returns the configured cap"""
    if min(c, xi, delta_e_bin, tau) < 0:
        raise DomainError("Trotter budget inputs must be non-negative")
    if xi == 0 or xi > 0.5:
        raise DomainError(f"bin fraction xi must lie in (0, 0.5], got {xi}")
    if delta_e_bin == 0 or tau == 0:
        raise DomainError("bin width and tau must be positive")
    if c == 0.0:
        logger.warning(f"Y3 vanishes; Trotter step capped at {max_step}")
        return TrotterBudget(c=c, xi=xi, delta_e_bin=delta_e_bin, tau=tau, delta_max=max_step, capped=True)
    step = math.sqrt(xi * delta_e_bin / (c * tau ** 2))
    return TrotterBudget(c=c, xi=xi, delta_e_bin=delta_e_bin, tau=tau, delta_max=step)


def verify_bias(cdf: CdfFactorization, delta: float, rescaled: Optional[RescaledHamiltonian] = None,
                e_id: float = 0.0, c_exact: Optional[float] = None, mode_cap: int = 10,
                branch_cut_margin: float = 1e-6, bias_rtol: float = 0.01, atol: float = 1e-10) -> BiasReport:
    """Eigenvalues of the effective one-step generator against the exact spectrum.

    Energies are absolute: E = e_id + eig(sum_j H_j). Eigenphases within
    branch_cut_margin of +-pi are excluded from the comparison.
    """
    if 2 * cdf.n_orb > mode_cap:
        raise CapacityError(f"{2 * cdf.n_orb} spin orbitals exceed the dense audit cap of {mode_cap}")
    tau = 1.0 if rescaled is None else rescaled.tau
    e_ref = 0.0 if rescaled is None else rescaled.e_ref
    prop = TrotterPropagator(cdf, mode_cap=mode_cap)
    exact = np.sort(scipy.linalg.eigvalsh(prop.hamiltonian_matrix()) + e_id)
    phases = np.angle(scipy.linalg.eigvals(prop.unitary(delta, tau, e_id - e_ref)))

    exact_phases = -delta * tau * (exact - e_ref)
    near_cut = np.abs(phases) > math.pi - branch_cut_margin
    exact_near_cut = np.abs(exact_phases) > math.pi - branch_cut_margin
    excluded = int(max(near_cut.sum(), exact_near_cut.sum()))
    if excluded:
        logger.warning(f"{excluded} eigenphases within {branch_cut_margin:g} of the branch cut excluded")
    effective = np.sort(-phases[~near_cut] / (delta * tau) + e_ref)
    reference = exact[~exact_near_cut]
    count = min(effective.size, reference.size)
    biases = np.abs(effective[:count] - reference[:count])

    c = y3_norm_exact(cdf, mode_cap) if c_exact is None else c_exact
    bound = c * tau ** 2 * delta ** 2
    max_bias = float(biases.max()) if biases.size else 0.0
    holds = max_bias <= bound * (1.0 + bias_rtol) + atol
    if not holds:
        logger.warning(f"Trotter bias {max_bias:.3e} exceeds the bound {bound:.3e}")
    return BiasReport(delta=delta, tau=tau, c_exact=c, bound=bound, max_bias=max_bias,
                      biases=biases.tolist(), excluded=excluded, bound_holds=bool(holds))
