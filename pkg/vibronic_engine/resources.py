"""
Logical cost of grid-based spin-vibronic propagation.

Per second-order step:  c_tof * N * M^d * (d * log2(K)^2 + N) Toffoli
Qubits:                 ceil(c_anc * (d^2 log2 K + ceil(log2 N))) ancillas
                        + M log2 K + ceil(log2 N) system qubits

c_tof and c_anc are calibration constants (see config).
"""

import logging
import math

from models.errors import DomainError
from models.resources import ResourceEstimate

logger = logging.getLogger(__name__)


def vibronic_resources(n_el: int, m_modes: int, grid_k: int, degree: int, n_steps: float,
                       c_tof: float = 0.45, c_anc: float = 0.33) -> ResourceEstimate:
    if min(n_el, m_modes, grid_k, n_steps) < 1:
        raise DomainError("vibronic resource inputs must all be >= 1")
    if degree not in (0, 1, 2):
        raise DomainError(f"coupling degree must be 0, 1 or 2, got {degree}")
    if grid_k & (grid_k - 1):
        raise DomainError(f"grid_k must be a power of two, got {grid_k}")
    log_k = int(math.log2(grid_k))
    log_n = math.ceil(math.log2(n_el)) if n_el > 1 else 0
    steps = int(round(n_steps))
    per_step = math.ceil(c_tof * n_el * m_modes ** degree * (degree * log_k ** 2 + n_el))
    ancillas = math.ceil(c_anc * (degree ** 2 * log_k + log_n))
    system = m_modes * log_k + log_n
    total = per_step * steps
    logger.info(f"Vibronic resources: {per_step} Toffoli/step x {steps} steps = {total:.3e}, "
                f"{system + ancillas} qubits")
    return ResourceEstimate(
        family="vibronic",
        logical_qubits=system + ancillas,
        toffoli_per_shot=total,
        shots=1,
        breakdown={"trotter_steps": total},
        formulas={"trotter_steps": "vibronic_step"},
        parameters={"n_el": n_el, "m_modes": m_modes, "grid_k": grid_k, "degree": degree, "n_steps": steps,
                    "per_step_toffoli": per_step, "ancillas": ancillas, "system_qubits": system,
                    "c_tof": c_tof, "c_anc": c_anc},
    )
