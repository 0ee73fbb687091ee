"""
Shift and rescale the Hamiltonian around one window edge so that the padded
support maps onto a full circle of eigenphases.
"""

import logging
import math

from models.dynamics import RescaledHamiltonian
from models.errors import ValidationError
from models.spectral import SpectralWindow

logger = logging.getLogger(__name__)


def pad_and_rescale(window: SpectralWindow, side: str) -> RescaledHamiltonian:
    """Extend the shorter arc so both sides of the reference edge have equal length; tau = 2 pi / Lambda"""
    if side not in ("L", "R"):
        raise ValidationError(f"side must be 'L' or 'R', got {side!r}")
    e_ref = window.e_hi if side == "L" else window.e_lo
    half = max(e_ref - window.e_min, window.e_max - e_ref)
    lambda_pad = 2.0 * half
    rescaled = RescaledHamiltonian(tau=2.0 * math.pi / lambda_pad, e_ref=e_ref, lambda_pad=lambda_pad, side=side,
                                   e_min_pad=e_ref - half, e_max_pad=e_ref + half)
    logger.debug(f"Rescaled side {side}: Lambda={lambda_pad:.6g}, tau={rescaled.tau:.6g}, "
                 f"padded support [{rescaled.e_min_pad:.6g}, {rescaled.e_max_pad:.6g}]")
    return rescaled
