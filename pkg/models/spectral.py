"""
Data models for step filters, spectral windows and shot budgets
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from models.errors import DomainError, ValidationError

LEFT_STEP = "left-step"
RIGHT_STEP = "right-step"


@dataclass(frozen=True, eq=False)
class FilterPolynomial:
    """Chebyshev-basis approximation of a Heaviside step on [-1, 1].

    A right-step passes x > 0, a left-step passes x < 0.
    """

    cheb_coeffs: np.ndarray
    degree: int
    transition_width: float
    eps_h: float
    orientation: str = RIGHT_STEP
    sharpness: float = 0.0
    certified_error: float = 0.0

    def __post_init__(self):
        if self.orientation not in (LEFT_STEP, RIGHT_STEP):
            raise ValidationError(f"unknown filter orientation {self.orientation!r}")
        coeffs = np.array(self.cheb_coeffs, dtype=float)
        nonzero = np.flatnonzero(coeffs)
        top = int(nonzero[-1]) if nonzero.size else 0
        if top != self.degree:
            raise ValidationError(f"degree {self.degree} does not match highest nonzero coefficient {top}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "cheb_coeffs", coeffs)

    def __call__(self, x):
        return np.polynomial.chebyshev.chebval(x, self.cheb_coeffs)

    def to_dict(self) -> Dict:
        return {
            "degree": self.degree,
            "transition_width": self.transition_width,
            "eps_h": self.eps_h,
            "orientation": self.orientation,
            "sharpness": self.sharpness,
            "certified_error": self.certified_error,
            "cheb_coeffs": self.cheb_coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "FilterPolynomial":
        return cls(cheb_coeffs=np.asarray(data["cheb_coeffs"], dtype=float), degree=int(data["degree"]),
                   transition_width=float(data["transition_width"]), eps_h=float(data["eps_h"]),
                   orientation=data.get("orientation", RIGHT_STEP),
                   sharpness=float(data.get("sharpness", 0.0)),
                   certified_error=float(data.get("certified_error", 0.0)))


@dataclass(frozen=True)
class DegreeFit:
    """Affine law between lambda'/Delta and the minimal filter degree"""

    slope: float = 4.7571
    intercept: float = 321.2051
    r_squared: float = 0.969733

    def evaluate(self, x: float) -> float:
        return self.slope * x + self.intercept

    def to_dict(self) -> Dict:
        return {"slope": self.slope, "intercept": self.intercept, "r_squared": self.r_squared}


@dataclass(frozen=True)
class SpectralWindow:
    """Energy window [e_lo, e_hi] inside the spectral support [e_min, e_max].

    All energies are absolute eigenvalues of the Hamiltonian the window is
    applied to. `lam` is the 1-norm normalizing that Hamiltonian; when absent
    the support bound max(|e_min|, |e_max|) is used.
    """

    e_lo: float
    e_hi: float
    e_min: float
    e_max: float
    delta: float
    lam: Optional[float] = None

    def __post_init__(self):
        if not self.e_min <= self.e_lo < self.e_hi <= self.e_max:
            raise ValidationError(
                f"window requires e_min <= e_lo < e_hi <= e_max, got "
                f"{self.e_min}, {self.e_lo}, {self.e_hi}, {self.e_max}")
        if not 0.0 < self.delta < self.e_hi - self.e_lo:
            raise ValidationError(f"transition width {self.delta} must lie in (0, e_hi - e_lo)")
        if self.lam is not None and self.lam < 0:
            raise DomainError(f"normalization must be non-negative, got {self.lam}")

    @property
    def normalization(self) -> float:
        if self.lam is not None:
            return self.lam
        return max(abs(self.e_min), abs(self.e_max))

    def lambda_prime(self, e_th: float) -> float:
        return self.normalization + abs(e_th)

    def contains(self, energy: float) -> bool:
        return self.e_lo <= energy <= self.e_hi

    def shifted(self, shift: float) -> "SpectralWindow":
        return SpectralWindow(e_lo=self.e_lo + shift, e_hi=self.e_hi + shift, e_min=self.e_min + shift,
                              e_max=self.e_max + shift, delta=self.delta,
                              lam=self.lam)

    def to_dict(self) -> Dict:
        return {"e_lo": self.e_lo, "e_hi": self.e_hi, "e_min": self.e_min, "e_max": self.e_max,
                "delta": self.delta, "lambda": self.normalization}


@dataclass(frozen=True, eq=False)
class DipoleState:
    """Normalized dipole-excited state D|E0>/sqrt(N_D) in the eigenbasis"""

    amplitudes: np.ndarray
    norm_d: float
    energies: np.ndarray
    ground_energy: float
    ground_degenerate: bool = False

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if self.norm_d < 0:
            raise ValidationError("dipole norm must be non-negative")
        if self.norm_d > 0 and abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise ValidationError("dipole-state amplitudes are not normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def weights(self) -> np.ndarray:
        """Probability of each eigenstate (summed over dipole components)"""
        w = np.abs(self.amplitudes) ** 2
        return w.reshape(-1, self.energies.size).sum(axis=0)


@dataclass(frozen=True)
class SamplingPlan:
    """Hoeffding shot budget and its double-measurement reduction"""

    eps_samp: float
    delta_samp: float
    s: int
    s_dm: int

    def __post_init__(self):
        if self.s != math.ceil(math.log(2.0 / self.delta_samp) / (2.0 * self.eps_samp ** 2)):
            raise ValidationError("shot count inconsistent with Hoeffding bound")
        if self.s_dm != math.ceil(self.s / 2):
            raise ValidationError("double-measurement shot count must be ceil(S/2)")

    def to_dict(self) -> Dict:
        return {"eps_samp": self.eps_samp, "delta_samp": self.delta_samp, "S": self.s, "S_dm": self.s_dm}


@dataclass
class WindowEstimate:
    """Monte-Carlo estimate of the window probability"""

    estimate: float
    interval: List[float]
    half_width: float
    n_samples: int
    shots: int
    seed: int
    filtered_probability: float
    exact: Optional[float] = None
    filter_degrees: List[int] = field(default_factory=list)
    flagged: bool = False

    def to_dict(self) -> Dict:
        return {
            "estimate": self.estimate,
            "interval": list(self.interval),
            "half_width": self.half_width,
            "samples": self.n_samples,
            "shots": self.shots,
            "seed": self.seed,
            "filtered_probability": self.filtered_probability,
            "exact": self.exact,
            "filter_degrees": list(self.filter_degrees),
            "flagged": self.flagged,
        }
