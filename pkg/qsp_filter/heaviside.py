"""
Heaviside step filters from the Chebyshev series of a scaled error function.

erf(k x) = sum_m c_{2m+1} T_{2m+1}(x),
c_{2m+1} = (2k / sqrt(pi)) (-1)^m [ive(m, k^2/2) + ive(m+1, k^2/2)] / (2m+1)

The series is truncated at an odd degree n, divided by its maximum modulus
on [-1, 1] and mapped to p = 1/2 +- q/2. For every degree the sharpness k is
tuned to minimize the certified error; the minimal degree is found by
doubling and then binary search over odd degrees.

Because the walk operator encodes arccos(H'/lambda') in its eigenphases, a
Chebyshev series in cos(theta) evaluated at x = (E - E_th)/lambda' is the
spectral response the circuit applies; no explicit arccos is needed.
"""

import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np
from numpy.polynomial import chebyshev
from scipy.fft import dct
from scipy.optimize import minimize_scalar
from scipy.special import erfcinv, ive

from models.errors import DomainError, SynthesisError
from models.spectral import LEFT_STEP, RIGHT_STEP, FilterPolynomial, SpectralWindow

logger = logging.getLogger(__name__)

SHARPNESS_BOUNDS = (0.5, 4.0)


class WindowResponse(NamedTuple):
    value: float
    flagged: bool


def erf_chebyshev_coefficients(k: float, degree: int) -> np.ndarray:
    """Chebyshev coefficients of erf(k x) truncated at `degree` (odd)"""
    coeffs = np.zeros(degree + 1)
    m = np.arange((degree + 1) // 2)
    z = k * k / 2.0
    odd = 2.0 * k / np.sqrt(np.pi) * (-1.0) ** m * (ive(m, z) + ive(m + 1, z)) / (2 * m + 1)
    coeffs[1::2] = odd
    return coeffs


def chebyshev_grid_values(coeffs: np.ndarray, n_points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Series values on x_j = cos(pi j / G) through a type-1 DCT"""
    g = max(n_points, 8 * coeffs.size)
    padded = np.zeros(g + 1)
    padded[:coeffs.size] = coeffs
    values = (dct(padded, type=1) + padded[0]) / 2.0
    x = np.cos(np.pi * np.arange(g + 1) / g)
    return x, values


class _Candidate(NamedTuple):
    error: float
    coeffs: np.ndarray
    k: float


def _evaluate(width: float, degree: int, a: float, n_points: int) -> _Candidate:
    k = 2.0 * a / width
    q = erf_chebyshev_coefficients(k, degree)
    x, values = chebyshev_grid_values(q, n_points)
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return _Candidate(np.inf, q, k)
    q = q / scale
    values = values / scale
    certified = np.abs(x) >= width / 2.0
    edges = np.array([-1.0, -width / 2.0, width / 2.0, 1.0])
    edge_values = chebyshev.chebval(edges, q)
    error = 0.5 * max(float(np.max(np.abs(values[certified] - np.sign(x[certified])))),
                      float(np.max(np.abs(edge_values - np.sign(edges)))))
    return _Candidate(error, q, k)


def _best_at_degree(width: float, degree: int, n_points: int) -> _Candidate:
    result = minimize_scalar(lambda a: _evaluate(width, degree, a, n_points).error,
                             bounds=SHARPNESS_BOUNDS, method="bounded", options={"xatol": 1e-4})
    return _evaluate(width, degree, float(result.x), n_points)


def _as_filter(candidate: _Candidate, degree: int, width: float, eps_h: float, orientation: str) -> FilterPolynomial:
    sign = 1.0 if orientation == RIGHT_STEP else -1.0
    coeffs = sign * 0.5 * candidate.coeffs
    coeffs[0] = 0.5
    degree = int(np.flatnonzero(coeffs)[-1])
    return FilterPolynomial(cheb_coeffs=coeffs[:degree + 1], degree=degree, transition_width=width, eps_h=eps_h,
                            orientation=orientation, sharpness=candidate.k, certified_error=candidate.error)


def synthesize_heaviside(transition_width: float, eps_h: float, orientation: str = RIGHT_STEP,
                         grid_points: int = 10000, max_degree: int = 131071) -> FilterPolynomial:
    """Minimal-degree step filter with sup error eps_h outside |x| < transition_width / 2"""
    if not 0.0 < transition_width < 1.0:
        raise DomainError(f"transition width must lie in (0, 1), got {transition_width}")
    if not 0.0 < eps_h < 0.5:
        raise DomainError(f"eps_h must lie in (0, 0.5), got {eps_h}")
    if orientation not in (LEFT_STEP, RIGHT_STEP):
        raise DomainError(f"unknown orientation {orientation!r}")

    # the untruncated erf already needs k w / 2 >= erfcinv(2 eps_h)
    a_min = float(erfcinv(2.0 * eps_h))
    if a_min > SHARPNESS_BOUNDS[1]:
        raise SynthesisError(f"eps_h={eps_h} is below the precision reachable with sharpness <= {SHARPNESS_BOUNDS[1]}")

    lo, hi = -1, 1
    found: Optional[_Candidate] = None
    while True:
        candidate = _best_at_degree(transition_width, hi, grid_points)
        logger.debug(f"degree {hi}: certified error {candidate.error:.3e}")
        if candidate.error <= eps_h:
            found = candidate
            break
        lo = hi
        hi = 2 * hi + 1
        if hi > max_degree:
            raise SynthesisError(
                f"no filter up to degree {max_degree} reaches eps_h={eps_h} at width {transition_width}")

    # lo fails, hi passes; both odd, searched as n = 2j + 1
    while hi - lo > 2:
        mid = 2 * (((lo - 1) // 2 + (hi - 1) // 2) // 2) + 1
        candidate = _best_at_degree(transition_width, mid, grid_points)
        logger.debug(f"degree {mid}: certified error {candidate.error:.3e}")
        if candidate.error <= eps_h:
            hi, found = mid, candidate
        else:
            lo = mid

    logger.info(f"Synthesized {orientation} filter: width={transition_width:.4g}, eps_h={eps_h}, degree={hi}")
    return _as_filter(found, hi, transition_width, eps_h, orientation)


def threshold_coordinate(energy, e_th: float, lambda_prime: float):
    return (np.asarray(energy, dtype=float) - e_th) / lambda_prime


def window_response_array(p_left: FilterPolynomial, p_right: FilterPolynomial, energies: np.ndarray,
                          window: SpectralWindow) -> Tuple[np.ndarray, np.ndarray]:
    """pL((E - E_hi)/lambda'_hi) * pR((E - E_lo)/lambda'_lo) with a per-energy flag.

    A flagged energy lies outside the window's spectral support or maps
    outside [-1, 1]; its coordinate is clipped before evaluation.
    """
    energies = np.asarray(energies, dtype=float)
    x_left = threshold_coordinate(energies, window.e_hi, window.lambda_prime(window.e_hi))
    x_right = threshold_coordinate(energies, window.e_lo, window.lambda_prime(window.e_lo))
    tol = 1e-12 * max(1.0, window.normalization)
    flagged = ((energies < window.e_min - tol) | (energies > window.e_max + tol)
               | (np.abs(x_left) > 1.0) | (np.abs(x_right) > 1.0))
    values = p_left(np.clip(x_left, -1.0, 1.0)) * p_right(np.clip(x_right, -1.0, 1.0))
    return values, flagged


def window_response(p_left: FilterPolynomial, p_right: FilterPolynomial, energy: float,
                    window: SpectralWindow) -> WindowResponse:
    values, flagged = window_response_array(p_left, p_right, np.array([energy]), window)
    if flagged[0]:
        logger.warning(f"energy {energy} lies outside the certified domain of the window filters")
    return WindowResponse(float(values[0]), bool(flagged[0]))


def build_window_filters(window: SpectralWindow, eps_h: float, grid_points: int = 10000,
                         max_degree: int = 131071) -> Tuple[FilterPolynomial, FilterPolynomial]:
    """Left-step at E_hi and right-step at E_lo, each certified at its own Delta / lambda'"""
    width_hi = window.delta / window.lambda_prime(window.e_hi)
    width_lo = window.delta / window.lambda_prime(window.e_lo)
    p_left = synthesize_heaviside(width_hi, eps_h, LEFT_STEP, grid_points, max_degree)
    p_right = synthesize_heaviside(width_lo, eps_h, RIGHT_STEP, grid_points, max_degree)
    return p_left, p_right
