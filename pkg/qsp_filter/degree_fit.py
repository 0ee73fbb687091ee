"""
Affine law between lambda'/Delta and the filter degree
"""

import logging
import math
from typing import Dict, List, Sequence

import numpy as np

from models.errors import DomainError, ValidationError
from models.spectral import RIGHT_STEP, DegreeFit
from qsp_filter.heaviside import synthesize_heaviside

logger = logging.getLogger(__name__)

REFERENCE_FIT = DegreeFit()


def fit_degree(lambda_prime_over_delta: float, fit: DegreeFit = REFERENCE_FIT) -> int:
    """ceil(slope * x + intercept)"""
    if lambda_prime_over_delta <= 0:
        raise DomainError(f"lambda'/Delta must be positive, got {lambda_prime_over_delta}")
    return int(math.ceil(fit.evaluate(lambda_prime_over_delta)))


def affine_fit(xs: Sequence[float], degrees: Sequence[float]) -> DegreeFit:
    """Least-squares line through (x, degree) with its coefficient of determination"""
    xs = np.asarray(xs, dtype=float)
    ds = np.asarray(degrees, dtype=float)
    if xs.size < 2 or xs.size != ds.size:
        raise ValidationError("affine fit needs at least two (x, degree) pairs of equal length")
    slope, intercept = np.polyfit(xs, ds, 1)
    residual = ds - (slope * xs + intercept)
    total = np.sum((ds - ds.mean()) ** 2)
    r_squared = 1.0 - float(np.sum(residual ** 2) / total) if total > 0 else 1.0
    return DegreeFit(slope=float(slope), intercept=float(intercept), r_squared=r_squared)


def measured_degrees(xs: Sequence[float], eps_h: float = 0.01, grid_points: int = 10000,
                     max_degree: int = 131071) -> List[int]:
    """Synthesized minimal degrees at transition width 1/x"""
    degrees = []
    for x in xs:
        filt = synthesize_heaviside(1.0 / x, eps_h, RIGHT_STEP, grid_points, max_degree)
        degrees.append(filt.degree)
        logger.debug(f"lambda'/Delta={x}: degree {filt.degree}")
    return degrees


def degree_table(xs: Sequence[float], eps_h: float = 0.01, synthesize: bool = False,
                 grid_points: int = 10000, max_degree: int = 131071) -> Dict:
    """Rows of (lambda'/Delta, fitted degree[, synthesized degree]) and the fit(s)"""
    rows = [{"lambda_prime_over_delta": float(x), "fit_degree": fit_degree(x)} for x in xs]
    result = {"rows": rows, "reference_fit": REFERENCE_FIT.to_dict()}
    if synthesize:
        degrees = measured_degrees(xs, eps_h, grid_points, max_degree)
        for row, d in zip(rows, degrees):
            row["synthesized_degree"] = d
        result["measured_fit"] = affine_fit(xs, degrees).to_dict()
        result["eps_h"] = eps_h
    return result
