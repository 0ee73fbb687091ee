"""
Unit conversion at the command-line boundary
"""

import re
from typing import Tuple

from models.errors import ValidationError

HARTREE_NM = 45.5633525316

_WINDOW = re.compile(r"^\s*([0-9.eE+-]+)\s*,\s*([0-9.eE+-]+)\s*(nm|ha)?\s*$", re.IGNORECASE)


def wavelength_to_hartree(nm: float) -> float:
    if nm <= 0:
        raise ValidationError(f"wavelength must be positive, got {nm}")
    return HARTREE_NM / nm


def parse_window_spec(spec: str) -> Tuple[float, float]:
    """'700,850nm' or '0.05,0.07Ha' -> (e_lo, e_hi) excitation energies in Hartree"""
    match = _WINDOW.match(spec)
    if not match:
        raise ValidationError(f"cannot parse window {spec!r}; expected 'lo,hi' followed by nm or Ha")
    a, b = float(match.group(1)), float(match.group(2))
    unit = (match.group(3) or "ha").lower()
    if unit == "nm":
        a, b = wavelength_to_hartree(a), wavelength_to_hartree(b)
    lo, hi = min(a, b), max(a, b)
    if not lo < hi:
        raise ValidationError(f"window {spec!r} is empty after conversion")
    return lo, hi
