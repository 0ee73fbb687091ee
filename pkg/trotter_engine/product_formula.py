"""
Symmetric second-order product formula over CDF fragments.

Fragments in Pauli form, one-body first and then the two-body fragments in
stored order:

    H_0 = -1/2 sum_k z0_k sum_gamma Z_k,gamma                   (basis u0)
    H_l = 1/8 sum_{(k,gamma) != (l,tau)} Z^l_kl Z_k,gamma Z_l,tau   (basis U^l)

Each fragment is diagonal in its rotated occupation basis, so
e^{-i s H_j} = G_j diag(e^{-i s d_j}) G_j^dagger exactly.
"""

import logging
from typing import List, NamedTuple, Optional

import numpy as np
from scipy.sparse.linalg import expm_multiply

from models.errors import CapacityError, DomainError
from models.factorization import CdfFactorization
from utils.fock_space import FockSpace, dense_rotation, lift_orbital_rotation

logger = logging.getLogger(__name__)


class PauliFragment(NamedTuple):
    rotation: np.ndarray
    core: np.ndarray
    one_body: bool

    def diagonal(self, space: FockSpace) -> np.ndarray:
        z = space.pauli_z()
        if self.one_body:
            return -0.5 * z @ np.concatenate([self.core, self.core])
        big = np.kron(np.ones((2, 2)), self.core)
        return 0.125 * (np.einsum("ai,ij,aj->a", z, big, z) - np.trace(big))

    def one_norm(self) -> float:
        if self.one_body:
            return float(np.abs(self.core).sum())
        diag = np.abs(np.diag(self.core)).sum()
        return float(0.5 * (np.abs(self.core).sum() - diag) + 0.25 * diag)


def cdf_fragments(cdf: CdfFactorization) -> List[PauliFragment]:
    fragments = [PauliFragment(cdf.u0, cdf.z0, True)]
    fragments.extend(PauliFragment(f.u, f.z, False) for f in cdf.fragments)
    return fragments


class TrotterPropagator:
    """Applies U_2(delta) for tau * (sum_j H_j + offset)"""

    def __init__(self, cdf: CdfFactorization, mode_cap: int = 14, dense_cap: int = 4096):
        self.fragments = cdf_fragments(cdf)
        self.space = FockSpace(2 * cdf.n_orb, mode_cap=mode_cap)
        self.generators = [lift_orbital_rotation(f.rotation, self.space) for f in self.fragments]
        self.diagonals = [f.diagonal(self.space) for f in self.fragments]
        self._rotations: Optional[List[np.ndarray]] = None
        if self.space.dim <= dense_cap:
            self._rotations = [dense_rotation(g) for g in self.generators]
        logger.debug(f"Trotter propagator: {len(self.fragments)} fragments, dim {self.space.dim}, "
                     f"dense rotations {'cached' if self._rotations else 'off'}")

    @property
    def dim(self) -> int:
        return self.space.dim

    def _apply_fragment(self, j: int, state: np.ndarray, s: float) -> np.ndarray:
        phases = np.exp(-1j * s * self.diagonals[j]).reshape((-1,) + (1,) * (state.ndim - 1))
        if self._rotations is not None:
            r = self._rotations[j]
            return r @ (phases * (r.conj().T @ state))
        rotated = expm_multiply(-self.generators[j], state)
        return expm_multiply(self.generators[j], phases * rotated)

    def step(self, state: np.ndarray, delta: float, tau: float = 1.0, offset: float = 0.0) -> np.ndarray:
        if delta <= 0:
            raise DomainError(f"Trotter step must be positive, got {delta}")
        out = np.asarray(state, dtype=complex)
        half = 0.5 * delta * tau
        order = list(range(len(self.fragments)))
        for j in order + order[::-1]:
            out = self._apply_fragment(j, out, half)
        return out * np.exp(-1j * delta * tau * offset)

    def fragment_matrix(self, j: int) -> np.ndarray:
        if self._rotations is None:
            raise CapacityError(f"dimension {self.dim} is too large for dense fragment matrices")
        r = self._rotations[j]
        return (r * self.diagonals[j]) @ r.conj().T

    def hamiltonian_matrix(self) -> np.ndarray:
        return sum(self.fragment_matrix(j) for j in range(len(self.fragments)))

    def unitary(self, delta: float, tau: float = 1.0, offset: float = 0.0) -> np.ndarray:
        if self._rotations is None:
            raise CapacityError(f"dimension {self.dim} is too large for a dense step unitary")
        return self.step(np.eye(self.dim, dtype=complex), delta, tau, offset)


def trotter_step(cdf: CdfFactorization, delta: float, state: np.ndarray, tau: float = 1.0, offset: float = 0.0,
                 mode_cap: int = 14) -> np.ndarray:
    return TrotterPropagator(cdf, mode_cap=mode_cap).step(state, delta, tau, offset)


def trotter_unitary(cdf: CdfFactorization, delta: float, tau: float = 1.0, offset: float = 0.0,
                    mode_cap: int = 10) -> np.ndarray:
    return TrotterPropagator(cdf, mode_cap=mode_cap).unitary(delta, tau, offset)
