"""
Fast-forwarded evolution under one-body spin-orbit operators and the short-time proxy
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import expm_multiply

from models.dynamics import ProxyResult
from models.errors import DomainError, ValidationError
from models.hamiltonian import SOCOperator
from utils.fock_space import FockSpace, check_hermitian, lift_orbital_rotation

logger = logging.getLogger(__name__)

CHANNEL_ALIASES = {"00": "0,0", "10": "1,0", "1+1": "1,+1", "1-1": "1,-1"}


def parse_channel(text: str) -> str:
    label = CHANNEL_ALIASES.get(text.replace(",", "").replace(" ", ""), text)
    if label not in CHANNEL_ALIASES.values():
        raise ValidationError(f"unknown spin channel {text!r}; use one of {sorted(CHANNEL_ALIASES)}")
    return label


def channel_operator(soc: SOCOperator, label: str) -> np.ndarray:
    """Hermitian generator of one spin channel; M = +1 and M = -1 share the spin-flip part"""
    return soc.channel_operator(parse_channel(label))


def _space_for(h: np.ndarray, state: np.ndarray, space: Optional[FockSpace], mode_cap: int) -> FockSpace:
    space = space or FockSpace(h.shape[0], mode_cap=mode_cap)
    if space.n_modes != h.shape[0]:
        raise ValidationError(f"operator acts on {h.shape[0]} spin orbitals, Fock space has {space.n_modes}")
    if state.shape != (space.dim,):
        raise ValidationError(f"state has shape {state.shape}, expected ({space.dim},)")
    return space


def _check_normalized(state: np.ndarray, what: str) -> None:
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-8:
        raise DomainError(f"{what} is not normalized (norm {norm:.12f})")


def fast_forward_soc(h_soc: np.ndarray, t: float, state: np.ndarray, space: Optional[FockSpace] = None,
                     mode_cap: int = 14, tol: float = 1e-10) -> np.ndarray:
    """e^{-itH}|state> as G(U0) e^{-it sum_k lam_k n_k} G(U0)^dagger with h = U0 diag(lam) U0^dagger"""
    h_soc = check_hermitian(h_soc, tol, "spin-orbit operator")
    state = np.asarray(state, dtype=complex)
    space = _space_for(h_soc, state, space, mode_cap)
    _check_normalized(state, "state")
    if t == 0.0:
        return state.copy()
    lam, u0 = scipy.linalg.eigh(0.5 * (h_soc + h_soc.conj().T))
    generator = lift_orbital_rotation(u0, space)
    rotated = expm_multiply(-generator, state)
    rotated *= np.exp(-1j * t * space.number_diagonal(lam))
    return expm_multiply(generator, rotated)


def proxy_rate(i_state: np.ndarray, f_state: np.ndarray, h_soc: np.ndarray, t: float,
               space: Optional[FockSpace] = None, limit: bool = True, mode_cap: int = 14) -> ProxyResult:
    """|<f|e^{-itH}|i>|^2 and its t^-2 scaled short-time limit"""
    if t < 0:
        raise DomainError(f"time must be non-negative, got {t}")
    if t == 0.0 and limit:
        raise DomainError("the t -> 0 limit estimate needs t > 0")
    f_state = np.asarray(f_state, dtype=complex)
    _check_normalized(f_state, "final state")
    evolved = fast_forward_soc(h_soc, t, i_state, space, mode_cap)
    element = complex(np.vdot(f_state, evolved))
    rate = float(abs(element) ** 2)
    if not limit:
        return ProxyResult(t=t, matrix_element=element, proxy_rate=rate, limit_estimate=None)
    space = space or FockSpace(np.asarray(h_soc).shape[0], mode_cap=mode_cap)
    coupling = complex(np.vdot(f_state, space.one_body_operator(np.asarray(h_soc)) @ np.asarray(i_state, dtype=complex)))
    coupling_sq = float(abs(coupling) ** 2)
    limit_estimate = rate / t ** 2
    remainder = abs(limit_estimate - coupling_sq) / t ** 2
    return ProxyResult(t=t, matrix_element=element, proxy_rate=rate, limit_estimate=limit_estimate,
                       coupling_sq=coupling_sq, remainder_coefficient=remainder)


def parse_time_grid(text: str) -> np.ndarray:
    """'a:b:n' -> n log-spaced times from a to b"""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError as e:
        raise ValidationError(f"cannot parse time grid {text!r}; expected a:b:n") from e
    if not 0 < a < b or n < 2:
        raise ValidationError(f"time grid needs 0 < a < b and n >= 2, got {text!r}")
    return np.geomspace(a, b, n)


def proxy_series(i_state: np.ndarray, f_state: np.ndarray, h_soc: np.ndarray, t_grid: Sequence[float],
                 space: Optional[FockSpace] = None, mode_cap: int = 14) -> Tuple[List[ProxyResult], float]:
    """Proxy over a time grid and the t -> 0 limit from a linear fit of k/t^2 against t^2"""
    space = space or FockSpace(np.asarray(h_soc).shape[0], mode_cap=mode_cap)
    results = [proxy_rate(i_state, f_state, h_soc, float(t), space) for t in t_grid]
    ts = np.array([r.t for r in results])
    scaled = np.array([r.limit_estimate for r in results])
    _, intercept = np.polyfit(ts ** 2, scaled, 1)
    logger.info(f"Proxy series over {len(results)} times; fitted limit {intercept:.6e}")
    return results, float(intercept)


def log_log_slope(t_grid: Sequence[float], rates: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log(t_grid), np.log(rates), 1)
    return float(slope)
