"""
Seeded synthetic stand-ins for molecular active spaces.

Real integrals are not shipped; presets instead draw THC and CDF factors
with the right shapes and magnitudes so that the resource sweeps can run at
the active-space sizes of the screened molecules. The same (n_orb, seed)
always gives bit-identical factors.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from factorization.lcu import one_norm
from hamiltonian_io.units import wavelength_to_hartree
from models.errors import DomainError
from models.factorization import CdfFactorization, CdfFragment, ThcFactorization
from models.spectral import SpectralWindow

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SyntheticSystem:
    n_orb: int
    seed: int
    one_body: np.ndarray
    thc: ThcFactorization
    cdf: CdfFactorization
    lambda_thc: float
    lambda_cdf: float
    window: SpectralWindow

    @property
    def lambda_prime(self) -> float:
        """Largest shifted 1-norm over the two window thresholds"""
        return self.lambda_thc + max(abs(self.window.e_lo), abs(self.window.e_hi))


def _orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def _symmetric_psd(rng: np.random.Generator, n: int, cols: int, scale: float) -> np.ndarray:
    g = rng.normal(size=(n, cols))
    z = scale * (g @ g.T) / cols
    return 0.5 * (z + z.T)


def excitation_window(e_ground: float, e_top: float, excitation: Tuple[float, float], delta: float) -> SpectralWindow:
    """Absolute-energy window for excitation energies above an assumed ground level"""
    lo, hi = sorted(excitation)
    return SpectralWindow(e_lo=e_ground + lo, e_hi=e_ground + hi, e_min=e_ground, e_max=e_top, delta=delta)


def synthetic_system(n_orb: int, seed: int, m_rank: Optional[int] = None, n_frag: Optional[int] = None,
                     one_body_scale: float = 1.0, two_body_scale: float = 0.5, decay: float = 0.7,
                     window_nm: Tuple[float, float] = (700.0, 850.0), delta: float = 0.005) -> SyntheticSystem:
    if n_orb < 1:
        raise DomainError(f"orbital count must be >= 1, got {n_orb}")
    m_rank = 4 * n_orb if m_rank is None else m_rank
    n_frag = n_orb if n_frag is None else n_frag
    if m_rank < 1 or n_frag < 0:
        raise DomainError("THC rank must be >= 1 and fragment count >= 0")
    rng = np.random.default_rng([seed, n_orb])

    levels = np.linspace(-one_body_scale, 0.5 * one_body_scale, n_orb)
    a = rng.normal(scale=0.1 * one_body_scale, size=(n_orb, n_orb))
    one_body = np.diag(levels) + 0.5 * (a + a.T)

    x = rng.normal(size=(n_orb, m_rank))
    x /= np.linalg.norm(x, axis=0)
    z = _symmetric_psd(rng, m_rank, m_rank, two_body_scale)
    thc = ThcFactorization(x=x, z=z, rank=m_rank, frob_error=0.0)

    z0, u0 = np.linalg.eigh(one_body)
    fragments = [CdfFragment(u=_orthogonal(rng, n_orb),
                             z=_symmetric_psd(rng, n_orb, n_orb, two_body_scale * decay ** rank))
                 for rank in range(n_frag)]
    cdf = CdfFactorization(u0=u0, z0=z0, fragments=fragments, frob_error=0.0)

    lambda_thc = one_norm(thc, one_body)
    lambda_cdf = one_norm(cdf)
    # support taken symmetric about zero at the larger 1-norm
    bound = max(lambda_thc, lambda_cdf)
    excitation = tuple(wavelength_to_hartree(nm) for nm in window_nm)
    window = excitation_window(-bound, bound, excitation, delta)
    logger.info(f"Synthetic system N={n_orb}, seed={seed}: M={m_rank}, L={n_frag}, "
                f"lambda_THC={lambda_thc:.4g}, lambda_CDF={lambda_cdf:.4g}")
    return SyntheticSystem(n_orb=n_orb, seed=seed, one_body=one_body, thc=thc, cdf=cdf,
                           lambda_thc=lambda_thc, lambda_cdf=lambda_cdf, window=window)
