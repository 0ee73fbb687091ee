"""
Data models for SOC proxies, Trotter audits and vibronic dynamics
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from models.errors import DomainError, ValidationError


@dataclass(frozen=True)
class ProxyResult:
    """Short-time transition amplitude under SOC-only evolution"""

    t: float
    matrix_element: complex
    proxy_rate: float
    limit_estimate: Optional[float]
    coupling_sq: Optional[float] = None
    remainder_coefficient: Optional[float] = None

    def to_dict(self) -> Dict:
        return {
            "t": self.t,
            "matrix_element": [self.matrix_element.real, self.matrix_element.imag],
            "proxy_rate": self.proxy_rate,
            "limit_estimate": self.limit_estimate,
            "coupling_sq": self.coupling_sq,
            "remainder_coefficient": self.remainder_coefficient,
        }


@dataclass(frozen=True)
class HadamardReadout:
    """Ancilla <X>, <Y> of the two-reference Hadamard test"""

    x_exp: float
    y_exp: float
    alpha: complex
    beta: complex
    gamma: float
    shots: Optional[int] = None

    def __post_init__(self):
        bound = (abs(self.alpha * self.beta) / self.gamma) ** 2
        if self.shots is None and self.x_exp ** 2 + self.y_exp ** 2 > bound + 1e-12:
            raise ValidationError("Hadamard readout exceeds its amplitude bound")

    def matrix_element(self) -> complex:
        """Recombine (x + iy) gamma / (alpha* beta) into <f|U|i>"""
        return complex(self.x_exp, self.y_exp) * self.gamma / (np.conj(self.alpha) * self.beta)

    def to_dict(self) -> Dict:
        return {"x": self.x_exp, "y": self.y_exp, "alpha": [self.alpha.real, self.alpha.imag],
                "beta": [self.beta.real, self.beta.imag], "gamma": self.gamma, "shots": self.shots}


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    state: np.ndarray
    success_prob: float
    flagged: bool = False


@dataclass(frozen=True)
class RescaledHamiltonian:
    """tau (H - e_ref) with the support padded to equal arcs around e_ref"""

    tau: float
    e_ref: float
    lambda_pad: float
    side: str
    e_min_pad: float
    e_max_pad: float

    def __post_init__(self):
        if self.side not in ("L", "R"):
            raise ValidationError(f"side must be 'L' or 'R', got {self.side!r}")
        if abs(self.tau * self.lambda_pad - 2.0 * np.pi) > 1e-12 * max(1.0, self.tau * self.lambda_pad):
            raise ValidationError("tau * lambda_pad must equal 2 pi")

    def to_dict(self) -> Dict:
        return {"tau": self.tau, "e_ref": self.e_ref, "lambda_pad": self.lambda_pad, "side": self.side,
                "e_min_pad": self.e_min_pad, "e_max_pad": self.e_max_pad}


@dataclass(frozen=True)
class TrotterBudget:
    c: float
    xi: float
    delta_e_bin: float
    tau: float
    delta_max: float
    capped: bool = False

    def to_dict(self) -> Dict:
        return {"c": self.c, "xi": self.xi, "delta_e_bin": self.delta_e_bin, "tau": self.tau,
                "delta_max": self.delta_max, "capped": self.capped}


@dataclass
class BiasReport:
    """Eigenvalue bias of the one-step Trotter generator against exact spectra"""

    delta: float
    tau: float
    c_exact: float
    bound: float
    max_bias: float
    biases: List[float]
    excluded: int = 0
    bound_holds: bool = True

    def to_dict(self) -> Dict:
        return {"delta": self.delta, "tau": self.tau, "c_exact": self.c_exact, "bound": self.bound,
                "max_bias": self.max_bias, "excluded": self.excluded, "bound_holds": self.bound_holds}


@dataclass(frozen=True, eq=False)
class VibronicModel:
    """Spin-vibronic model with harmonic reference and Taylor-expanded couplings"""

    spin_labels: Sequence[str]
    omegas: np.ndarray
    lambda0: np.ndarray
    a_lin: np.ndarray
    b_quad: np.ndarray
    degree: int = 2
    grid_k: int = 32
    q_extent: float = 8.0

    def __post_init__(self):
        labels = tuple(str(s).upper() for s in self.spin_labels)
        n = len(labels)
        if n < 1 or any(s not in ("S", "T") for s in labels):
            raise ValidationError("spin labels must be a non-empty list of 'S'/'T'")
        omegas = np.array(self.omegas, dtype=float).reshape(-1)
        m = omegas.size
        if np.any(omegas <= 0):
            raise DomainError("mode frequencies must be positive")
        lam = np.array(self.lambda0, dtype=complex).reshape(n, n)
        a = np.array(self.a_lin, dtype=complex).reshape(m, n, n)
        b = np.array(self.b_quad, dtype=complex).reshape(m, m, n, n)
        for name, arr in (("lambda0", lam), ("a_lin", a), ("b_quad", b)):
            if np.max(np.abs(arr - np.swapaxes(arr, -1, -2).conj()), initial=0.0) > 1e-12:
                raise ValidationError(f"{name} is not Hermitian in the electronic indices")
        if self.degree not in (0, 1, 2):
            raise ValidationError(f"coupling degree must be 0, 1 or 2, got {self.degree}")
        if self.grid_k < 2 or self.grid_k & (self.grid_k - 1):
            raise ValidationError(f"grid_k must be a power of two, got {self.grid_k}")
        for arr in (omegas, lam, a, b):
            arr.setflags(write=False)
        object.__setattr__(self, "spin_labels", labels)
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "lambda0", lam)
        object.__setattr__(self, "a_lin", a)
        object.__setattr__(self, "b_quad", b)

    @property
    def n_el(self) -> int:
        return len(self.spin_labels)

    @property
    def n_modes(self) -> int:
        return self.omegas.size

    @property
    def triplet_mask(self) -> np.ndarray:
        return np.array([s == "T" for s in self.spin_labels])

    @classmethod
    def from_dict(cls, data: Dict) -> "VibronicModel":
        labels = data["spin_labels"]
        n = len(labels)
        omegas = np.asarray(data["omegas"], dtype=float)
        m = omegas.size

        def _complex(key, shape):
            if key not in data:
                return np.zeros(shape, dtype=complex)
            arr = np.asarray(data[key], dtype=float)
            if f"{key}_im" in data:
                arr = arr + 1j * np.asarray(data[f"{key}_im"], dtype=float)
            return arr.reshape(shape)

        return cls(spin_labels=labels, omegas=omegas, lambda0=_complex("lambda0", (n, n)),
                   a_lin=_complex("a_lin", (m, n, n)), b_quad=_complex("b_quad", (m, m, n, n)),
                   degree=int(data.get("degree", 2)), grid_k=int(data.get("grid_k", 32)),
                   q_extent=float(data.get("q_extent", 8.0)))


@dataclass
class PopulationTrace:
    times: np.ndarray
    p_t: np.ndarray
    norm_drift: float
    energies: Optional[np.ndarray] = None

    def to_dict(self) -> Dict:
        return {"times": np.asarray(self.times).tolist(), "p_t": np.asarray(self.p_t).tolist(),
                "norm_drift": self.norm_drift}


@dataclass(frozen=True)
class RateFit:
    k_isc_vib: float
    r_squared: float
    n_points: int
    flagged: bool = False
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {"k_isc_vib": self.k_isc_vib, "r_squared": self.r_squared, "n_points": self.n_points,
                "flagged": self.flagged, "notes": list(self.notes)}
