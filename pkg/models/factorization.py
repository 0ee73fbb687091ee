"""
Data models for low-rank two-body factorizations and shifted LCU normalizations
"""

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from models.errors import DomainError, ValidationError


def _orthogonality_defect(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.T @ u - np.eye(u.shape[1])))) if u.size else 0.0


@dataclass(frozen=True, eq=False)
class ThcFactorization:
    """v_pqrs ~ sum_{mu,nu} X_p,mu X_q,mu Z_mu,nu X_r,nu X_s,nu"""

    x: np.ndarray
    z: np.ndarray
    rank: int
    frob_error: float
    threshold: float = float("inf")
    converged: bool = True

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        z = np.array(self.z, dtype=float)
        if x.ndim != 2 or x.shape[1] != self.rank or z.shape != (self.rank, self.rank):
            raise ValidationError(f"THC shapes inconsistent: X{x.shape}, Z{z.shape}, rank {self.rank}")
        if self.rank and np.max(np.abs(z - z.T)) > 1e-10:
            raise ValidationError("THC core Z is not symmetric")
        if self.rank and np.max(np.abs(np.linalg.norm(x, axis=0) - 1.0)) > 1e-10:
            raise ValidationError("THC leaf columns are not normalized")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @property
    def n_orb(self) -> int:
        return self.x.shape[0]

    def reconstruct(self) -> np.ndarray:
        n = self.x.shape[0]
        if self.rank == 0:
            return np.zeros((n, n, n, n))
        return np.einsum("pm,qm,mn,rn,sn->pqrs", self.x, self.x, self.z, self.x, self.x, optimize=True)

    def to_dict(self) -> Dict:
        return {
            "method": "thc",
            "n_orb": self.n_orb,
            "rank": self.rank,
            "frob_error": self.frob_error,
            "threshold": self.threshold,
            "converged": self.converged,
            "x": self.x.tolist(),
            "z": self.z.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ThcFactorization":
        rank = int(data["rank"])
        n = int(data["n_orb"])
        x = np.asarray(data["x"], dtype=float).reshape(n, rank)
        z = np.asarray(data["z"], dtype=float).reshape(rank, rank)
        return cls(x=x, z=z, rank=rank, frob_error=float(data["frob_error"]),
                   threshold=float(data.get("threshold", float("inf"))),
                   converged=bool(data.get("converged", True)))


@dataclass(frozen=True, eq=False)
class CdfFragment:
    u: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        z = np.array(self.z, dtype=float)
        if _orthogonality_defect(u) > 1e-10:
            raise ValidationError("fragment rotation is not orthogonal")
        if np.max(np.abs(z - z.T), initial=0.0) > 1e-10:
            raise ValidationError("fragment core is not symmetric")
        u.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "z", z)


@dataclass(frozen=True, eq=False)
class CdfFactorization:
    """One-body part in its eigenbasis plus two-body fragments in rotated bases.

    H = e_id + sum_k z0_k n_k[u0] + 1/2 sum_l sum_kl Z^l_kl n_k[U^l] n_l[U^l]
    with the one-body matrix taken in the Pauli convention (see
    factorization.lcu.pauli_one_body).
    """

    u0: np.ndarray
    z0: np.ndarray
    fragments: List[CdfFragment] = field(default_factory=list)
    frob_error: float = 0.0
    threshold: float = float("inf")
    converged: bool = True

    def __post_init__(self):
        u0 = np.array(self.u0, dtype=float)
        z0 = np.array(self.z0, dtype=float)
        if _orthogonality_defect(u0) > 1e-10:
            raise ValidationError("one-body rotation u0 is not orthogonal")
        if z0.shape != (u0.shape[0],):
            raise ValidationError(f"z0 has shape {z0.shape}, expected ({u0.shape[0]},)")
        u0.setflags(write=False)
        z0.setflags(write=False)
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "fragments", list(self.fragments))

    @property
    def n_orb(self) -> int:
        return self.u0.shape[0]

    @property
    def n_frag(self) -> int:
        return len(self.fragments)

    def one_body_matrix(self) -> np.ndarray:
        return self.u0 @ np.diag(self.z0) @ self.u0.T

    def reconstruct(self) -> np.ndarray:
        n = self.n_orb
        v = np.zeros((n, n, n, n))
        for frag in self.fragments:
            v += np.einsum("pk,qk,kl,rl,sl->pqrs", frag.u, frag.u, frag.z, frag.u, frag.u, optimize=True)
        return v

    def rotations_and_cores(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        return [(f.u, f.z) for f in self.fragments]

    def to_dict(self) -> Dict:
        return {
            "method": "cdf",
            "n_orb": self.n_orb,
            "n_frag": self.n_frag,
            "frob_error": self.frob_error,
            "threshold": self.threshold,
            "converged": self.converged,
            "u0": self.u0.tolist(),
            "z0": self.z0.tolist(),
            "fragments": [{"u": f.u.tolist(), "z": f.z.tolist()} for f in self.fragments],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "CdfFactorization":
        frags = [CdfFragment(u=np.asarray(f["u"], dtype=float), z=np.asarray(f["z"], dtype=float))
                 for f in data.get("fragments", [])]
        return cls(u0=np.asarray(data["u0"], dtype=float), z0=np.asarray(data["z0"], dtype=float),
                   fragments=frags, frob_error=float(data.get("frob_error", 0.0)),
                   threshold=float(data.get("threshold", float("inf"))),
                   converged=bool(data.get("converged", True)))


@dataclass(frozen=True)
class ShiftedLcu:
    """1-norm of the threshold-shifted Hamiltonian H - E_th"""

    lam: float
    e_th: float
    lambda_prime: float

    def __post_init__(self):
        if self.lam < 0:
            raise DomainError(f"1-norm must be non-negative, got {self.lam}")
        if self.lambda_prime != self.lam + abs(self.e_th):
            raise ValidationError("lambda_prime must equal lambda + |e_th|")

    def to_dict(self) -> Dict:
        return {"lambda": self.lam, "e_th": self.e_th, "lambda_prime": self.lambda_prime}
