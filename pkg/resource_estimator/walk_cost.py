"""
Per-walk cost model for the THC qubitization oracle with batched angle loading.

PREPARE    coherent alias sampling over the M(M+1)/2 + M THC coefficients
           at aleph bits, applied and inverted once per walk step
SELECT     ceil(L_theta / B) QROM loads of B rotation angles each, plus the
           Givens rotations themselves at beth - 2 Toffoli per rotation
           through a phase-gradient register
reflection on the index and keep registers, plus a constant control overhead

Every constant not fixed by the formulas above lives in the config
`walk_constants` object.
"""

import logging
import math
from typing import Dict, Optional, Tuple

from models.errors import DomainError
from models.resources import PrecisionBits, WalkCostModel

logger = logging.getLogger(__name__)

DEFAULT_WALK_CONSTANTS = {
    "uniform_prep_per_bit": 3,
    "reflection_extra": 2,
    "control_overhead": 8,
    "aux_flags": 6,
}


def _bits(x: float) -> int:
    """ceil(log2 x), 0 for x <= 1"""
    return math.ceil(math.log2(x)) if x > 1 else 0


def precision_bits(lambda_prime: float, eps_coeff: float, eps_rot: float, n_orb: int) -> PrecisionBits:
    """aleph = ceil(2.5 + log2(lambda'/eps_coeff)), beth = ceil(5.625 + log2(2 lambda' N / eps_rot))"""
    if min(lambda_prime, eps_coeff, eps_rot) <= 0 or n_orb < 1:
        raise DomainError("precision inputs must all be positive")
    aleph = math.ceil(2.5 + math.log2(lambda_prime / eps_coeff))
    beth = math.ceil(5.625 + math.log2(2.0 * lambda_prime * n_orb / eps_rot))
    logger.debug(f"Precision bits for lambda'={lambda_prime:.6g}, N={n_orb}: aleph={aleph}, beth={beth}")
    return PrecisionBits(aleph=aleph, beth=beth, eps_coeff=eps_coeff, eps_rot=eps_rot)


def sos_cost(d_dets: int) -> Tuple[int, int]:
    """Sum-of-Slaters preparation: (2L - 2) D + 2^(L+1) + D Toffoli and 5L - 3 ancillas, L = ceil(log2 D)"""
    if d_dets < 1:
        raise DomainError(f"determinant count must be >= 1, got {d_dets}")
    d_dets = int(d_dets)
    n_bits = _bits(d_dets)
    toffoli = max(0, (2 * n_bits - 2) * d_dets + 2 ** (n_bits + 1) + d_dets)
    ancillas = max(0, 5 * n_bits - 3)
    return toffoli, ancillas


def walk_cost(m_rank: int, n_orb: int, bits: PrecisionBits, batch_b: int = 1,
              constants: Optional[Dict[str, int]] = None) -> WalkCostModel:
    if m_rank < 1 or n_orb < 1:
        raise DomainError("THC rank and orbital count must be >= 1")
    c = dict(DEFAULT_WALK_CONSTANTS)
    if constants:
        c.update(constants)

    # two basis rotations (mu and nu) of N Givens angles on each spin register
    l_theta = 4 * n_orb
    if not 1 <= batch_b <= l_theta:
        raise DomainError(f"batch size must lie in [1, {l_theta}], got {batch_b}")
    aleph, beth = bits.aleph, bits.beth
    n_m = _bits(m_rank + 1)
    entries = m_rank * (m_rank + 1) // 2 + m_rank

    uniform = 2 * c["uniform_prep_per_bit"] * n_m
    contiguous = 2 * (n_m ** 2 + n_m - 1)
    qrom = 2 * entries
    comparator = 2 * aleph
    swaps = 4 * n_m + 2 * n_m + 3
    prepare = uniform + contiguous + qrom + comparator + swaps

    qrom_calls = math.ceil(l_theta / batch_b)
    loads = 2 * qrom_calls * (m_rank + n_orb - 1)
    rotations = 2 * l_theta * (beth - 2)
    spin_swaps = 4 * n_orb
    select = loads + rotations + spin_swaps + 1

    reflection = 2 * n_m + aleph + c["reflection_extra"]
    g_toffoli = prepare + select + reflection + c["control_overhead"]

    n_aux = 2 * n_m + batch_b * beth + beth + aleph + c["aux_flags"]
    logger.debug(f"Walk cost M={m_rank}, N={n_orb}, B={batch_b}: prepare={prepare}, select={select}, "
                 f"reflection={reflection}, G={g_toffoli}, n_aux={n_aux}")
    return WalkCostModel(m_rank=m_rank, n_orb=n_orb, batch_b=batch_b, l_theta=l_theta, qrom_calls=qrom_calls,
                         g_toffoli=g_toffoli, n_aux=n_aux, prepare_toffoli=prepare, select_toffoli=select,
                         reflection_toffoli=reflection)
