"""
Data models for active-space Hamiltonians, dipole and spin-orbit operators, solvents
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from models.errors import DomainError, ValidationError

SPIN_TENSOR_LABELS = ("0,0", "1,0", "1,+1", "1,-1")


def _frozen(array, dtype=float) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def _symmetrized(array) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    if out.ndim == 2 and out.shape[0] == out.shape[1]:
        out = 0.5 * (out + out.T)
    out.setflags(write=False)
    return out


def max_asymmetry(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0


def max_non_hermiticity(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0


def two_body_asymmetry(v: np.ndarray) -> float:
    """Largest deviation from the 8-fold real permutation symmetry of (pq|rs)"""
    if v.size == 0:
        return 0.0
    perms = (v.transpose(1, 0, 2, 3), v.transpose(0, 1, 3, 2), v.transpose(2, 3, 0, 1))
    return float(max(np.max(np.abs(v - p)) for p in perms))


@dataclass(frozen=True, eq=False)
class ActiveSpaceHamiltonian:
    """One- and two-electron integrals (chemist notation) of an active space"""

    n_orb: int
    t: np.ndarray
    v: np.ndarray
    e_core: float = 0.0
    n_elec: Optional[int] = None
    ms2: int = 0
    tol: float = field(default=1e-12, repr=False, compare=False)

    def __post_init__(self):
        if self.n_orb < 1:
            raise ValidationError(f"n_orb must be >= 1, got {self.n_orb}")
        t = _frozen(self.t)
        v = _frozen(self.v)
        n = self.n_orb
        if t.shape != (n, n):
            raise ValidationError(f"t has shape {t.shape}, expected {(n, n)}")
        if v.shape != (n, n, n, n):
            raise ValidationError(f"v has shape {v.shape}, expected {(n, n, n, n)}")
        if max_asymmetry(t) > self.tol:
            raise ValidationError(f"t not symmetric (deviation {max_asymmetry(t):.3e})")
        if two_body_asymmetry(v) > self.tol:
            raise ValidationError(f"v violates 8-fold symmetry (deviation {two_body_asymmetry(v):.3e})")
        if self.n_elec is not None and not 0 <= self.n_elec <= 2 * n:
            raise ValidationError(f"n_elec={self.n_elec} incompatible with {2 * n} spin orbitals")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "e_core", float(self.e_core))

    def replace(self, t: Optional[np.ndarray] = None, v: Optional[np.ndarray] = None,
                e_core: Optional[float] = None) -> "ActiveSpaceHamiltonian":
        return ActiveSpaceHamiltonian(
            n_orb=self.n_orb,
            t=self.t if t is None else t,
            v=self.v if v is None else v,
            e_core=self.e_core if e_core is None else e_core,
            n_elec=self.n_elec,
            ms2=self.ms2,
            tol=self.tol,
        )

    def to_dict(self) -> Dict:
        return {
            "n_orb": self.n_orb,
            "e_core": self.e_core,
            "n_elec": self.n_elec,
            "ms2": self.ms2,
            "t": self.t.tolist(),
            "v": self.v.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ActiveSpaceHamiltonian":
        return cls(
            n_orb=int(data["n_orb"]),
            t=np.asarray(data["t"], dtype=float),
            v=np.asarray(data["v"], dtype=float),
            e_core=float(data.get("e_core", 0.0)),
            n_elec=data.get("n_elec"),
            ms2=int(data.get("ms2", 0)),
        )

    def __str__(self) -> str:
        return f"ActiveSpaceHamiltonian(n_orb={self.n_orb}, n_elec={self.n_elec}, e_core={self.e_core:.6f})"


@dataclass(frozen=True, eq=False)
class DipoleOperator:
    """Cartesian dipole integrals, one real symmetric N x N matrix per axis"""

    d: Tuple[np.ndarray, np.ndarray, np.ndarray]
    tol: float = field(default=1e-12, repr=False, compare=False)

    def __post_init__(self):
        if len(self.d) != 3:
            raise ValidationError(f"dipole needs 3 components, got {len(self.d)}")
        comps = tuple(_frozen(c) for c in self.d)
        for axis, c in zip("xyz", comps):
            if c.ndim != 2 or c.shape[0] != c.shape[1]:
                raise ValidationError(f"dipole component {axis} is not square: {c.shape}")
            if max_asymmetry(c) > self.tol:
                raise ValidationError(f"dipole component {axis} not symmetric")
        if len({c.shape for c in comps}) != 1:
            raise ValidationError("dipole components have mismatched shapes")
        object.__setattr__(self, "d", comps)

    @property
    def n_orb(self) -> int:
        return self.d[0].shape[0]

    def to_dict(self) -> Dict:
        return {"d": [c.tolist() for c in self.d]}


@dataclass(frozen=True, eq=False)
class SOCOperator:
    """Spin-orbit one-body matrix over 2N spin orbitals (index sigma*N + p)"""

    h_soc: np.ndarray
    components: Dict[str, np.ndarray]
    tol: float = field(default=1e-12, repr=False, compare=False)

    def __post_init__(self):
        h = _frozen(self.h_soc, complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] % 2:
            raise ValidationError(f"h_soc must be 2N x 2N, got {h.shape}")
        if max_non_hermiticity(h) > self.tol:
            raise ValidationError(f"h_soc not Hermitian (deviation {max_non_hermiticity(h):.3e})")
        comps = {label: _frozen(self.components[label], complex) for label in SPIN_TENSOR_LABELS}
        residual = sum(comps.values()) - h
        if np.linalg.norm(residual) > self.tol:
            raise ValidationError("spin-tensor components do not reassemble h_soc")
        object.__setattr__(self, "h_soc", h)
        object.__setattr__(self, "components", comps)

    @property
    def n_orb(self) -> int:
        return self.h_soc.shape[0] // 2

    @classmethod
    def from_matrix(cls, h_soc: np.ndarray, tol: float = 1e-12) -> "SOCOperator":
        """Split h_soc into spin-tensor parts from its spin-block structure.

        Same-spin blocks give the M=0 parts: their spin-averaged combination is
        the (0,0) singlet part and the spin-difference is the (1,0) part.
        The alpha-beta block raises M and is the (1,+1) part; the beta-alpha
        block is the (1,-1) part.
        """
        h = np.asarray(h_soc, dtype=complex)
        n = h.shape[0] // 2
        aa, bb = h[:n, :n], h[n:, n:]
        avg, diff = (aa + bb) / 2.0, (aa - bb) / 2.0
        zero = np.zeros((n, n), dtype=complex)
        comps = {
            "0,0": np.block([[avg, zero], [zero, avg]]),
            "1,0": np.block([[diff, zero], [zero, -diff]]),
            "1,+1": np.block([[zero, h[:n, n:]], [zero, zero]]),
            "1,-1": np.block([[zero, zero], [h[n:, :n], zero]]),
        }
        return cls(h_soc=h, components=comps, tol=tol)

    def channel_operator(self, label: str) -> np.ndarray:
        """Hermitian evolution generator of a spin channel.

        The M=+1 and M=-1 parts are adjoints of each other, so both channels
        evolve under their Hermitian sum.
        """
        if label not in SPIN_TENSOR_LABELS:
            raise DomainError(f"unknown spin-tensor channel {label!r}")
        if label in ("1,+1", "1,-1"):
            return self.components["1,+1"] + self.components["1,-1"]
        return self.components[label].copy()

    def to_dict(self) -> Dict:
        return {"re": self.h_soc.real.tolist(), "im": self.h_soc.imag.tolist()}


@dataclass(frozen=True, eq=False)
class BosonMode:
    omega: float
    g: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "g", _symmetrized(self.g))


@dataclass(frozen=True, eq=False)
class SolventModel:
    """Static solvent description: none, PCM-static or a bosonic bath"""

    kind: str = "none"
    epsilon: float = 1.0
    reaction_field: Optional[np.ndarray] = None
    modes: List[BosonMode] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in ("none", "pcm_static", "bosonic"):
            raise ValidationError(f"unknown solvent kind {self.kind!r}")
        if self.kind == "pcm_static" and self.epsilon < 1.0:
            raise DomainError(f"dielectric constant must be >= 1, got {self.epsilon}")
        if self.kind == "bosonic":
            for k, mode in enumerate(self.modes):
                if mode.omega <= 0.0:
                    raise DomainError(f"bosonic mode {k} has non-positive frequency {mode.omega}")
        if self.reaction_field is not None:
            object.__setattr__(self, "reaction_field", _symmetrized(self.reaction_field))
        object.__setattr__(self, "modes", list(self.modes))

    @classmethod
    def from_dict(cls, data: Dict) -> "SolventModel":
        modes = [BosonMode(omega=float(m["omega"]), g=np.asarray(m["g"], dtype=float))
                 for m in data.get("modes", [])]
        rf = data.get("reaction_field")
        return cls(
            kind=data.get("kind", "none"),
            epsilon=float(data.get("epsilon", 1.0)),
            reaction_field=None if rf is None else np.asarray(rf, dtype=float),
            modes=modes,
        )


@dataclass(frozen=True, eq=False)
class LoadedIntegrals:
    """Everything read from one integral file"""

    hamiltonian: ActiveSpaceHamiltonian
    dipole: Optional[DipoleOperator] = None
    soc: Optional[SOCOperator] = None
