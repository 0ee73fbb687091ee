"""
Two-reference Hadamard test for off-diagonal matrix elements.

The ancilla starts in (alpha|0>|f> + beta|1>U|i>) / sqrt(2 gamma) with
gamma = (|alpha|^2 + |beta|^2) / 2. Measuring X or Y on the ancilla gives

    <X> + i<Y> = (alpha* beta / gamma) <f|U|i>
"""

import logging
from typing import Optional

import numpy as np

from models.dynamics import HadamardReadout
from models.errors import DomainError
from isc_proxy.evolution import fast_forward_soc
from utils.fock_space import FockSpace

logger = logging.getLogger(__name__)


def _sampled(rng: np.random.Generator, expectation: float, shots: int) -> float:
    plus = rng.random(shots) < (1.0 + np.clip(expectation, -1.0, 1.0)) / 2.0
    return float(2.0 * plus.mean() - 1.0)


def modified_hadamard(i_state: np.ndarray, f_state: np.ndarray, h_soc: np.ndarray, t: float,
                      alpha: complex, beta: complex, shots: Optional[int] = None, seed: Optional[int] = None,
                      space: Optional[FockSpace] = None, mode_cap: int = 14) -> HadamardReadout:
    gamma = (abs(alpha) ** 2 + abs(beta) ** 2) / 2.0
    if gamma == 0.0:
        raise DomainError("alpha and beta cannot both vanish")
    evolved = fast_forward_soc(h_soc, t, i_state, space, mode_cap)
    f_state = np.asarray(f_state, dtype=complex)
    # off-diagonal element of the reduced ancilla density matrix
    rho01 = alpha * np.conj(beta) * np.vdot(evolved, f_state) / (2.0 * gamma)
    x_exp = float(2.0 * rho01.real)
    y_exp = float(-2.0 * rho01.imag)
    if shots is None:
        return HadamardReadout(x_exp, y_exp, complex(alpha), complex(beta), gamma)
    if shots <= 0:
        raise DomainError(f"shot count must be positive, got {shots}")
    rng = np.random.default_rng(seed)
    x_hat, y_hat = _sampled(rng, x_exp, shots), _sampled(rng, y_exp, shots)
    logger.debug(f"Hadamard test with {shots} shots per basis: X {x_exp:.4f} -> {x_hat:.4f}, Y {y_exp:.4f} -> {y_hat:.4f}")
    return HadamardReadout(x_hat, y_hat, complex(alpha), complex(beta), gamma, shots=shots)
