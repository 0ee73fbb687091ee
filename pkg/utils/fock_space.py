"""
Second-quantized operators on a Jordan-Wigner occupation basis.

Mode j is bit j of the basis label. Spin orbitals are laid out as
sigma * N + p with the alpha block first. Operators are returned as
scipy CSR matrices so that expm_multiply and eigsh work on them directly.
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from models.errors import CapacityError, DomainError, ValidationError
from models.hamiltonian import ActiveSpaceHamiltonian, max_non_hermiticity

logger = logging.getLogger(__name__)


class FockSpace:
    """Occupation-number basis over n_modes fermionic modes.

    With `sector` set only determinants with that particle number are kept.
    """

    def __init__(self, n_modes: int, sector: Optional[int] = None, mode_cap: int = 14):
        if n_modes < 1:
            raise ValidationError(f"need at least one mode, got {n_modes}")
        if n_modes > mode_cap:
            raise CapacityError(f"{n_modes} modes exceed the Fock-space cap of {mode_cap}")
        self.n_modes = n_modes
        self.sector = sector
        labels = np.arange(1 << n_modes, dtype=np.int64)
        self.occupations = ((labels[:, None] >> np.arange(n_modes)) & 1).astype(np.int8)
        if sector is not None:
            if not 0 <= sector <= n_modes:
                raise ValidationError(f"particle number {sector} impossible with {n_modes} modes")
            keep = self.occupations.sum(axis=1) == sector
            labels = labels[keep]
            self.occupations = self.occupations[keep]
        self.labels = labels
        # occupied modes strictly below each mode, for Jordan-Wigner signs
        self._below = np.cumsum(self.occupations, axis=1) - self.occupations
        logger.debug(f"FockSpace: {n_modes} modes, sector={sector}, dim={self.dim}")

    @property
    def dim(self) -> int:
        return int(self.labels.size)

    def index_of(self, occupied: Iterable[int]) -> int:
        label = 0
        for mode in occupied:
            label |= 1 << int(mode)
        pos = int(np.searchsorted(self.labels, label))
        if pos >= self.dim or self.labels[pos] != label:
            raise DomainError(f"determinant {sorted(occupied)} is not in this Fock space")
        return pos

    def basis_state(self, occupied: Iterable[int]) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.index_of(occupied)] = 1.0
        return psi

    def hopping(self, p: int, q: int) -> sp.csr_matrix:
        """a_p^dagger a_q"""
        occ = self.occupations
        if p == q:
            return sp.diags(occ[:, p].astype(float), format="csr")
        mask = (occ[:, q] == 1) & (occ[:, p] == 0)
        src = np.flatnonzero(mask)
        new_labels = (self.labels[src] ^ (1 << q)) | (1 << p)
        dst = np.searchsorted(self.labels, new_labels)
        parity = self._below[src, q] + self._below[src, p] - (1 if q < p else 0)
        signs = np.where(parity % 2, -1.0, 1.0)
        return sp.csr_matrix((signs, (dst, src)), shape=(self.dim, self.dim))

    def one_body_operator(self, h: np.ndarray) -> sp.csr_matrix:
        """sum_pq h_pq a_p^dagger a_q"""
        h = np.asarray(h)
        if h.shape != (self.n_modes, self.n_modes):
            raise ValidationError(f"one-body matrix {h.shape} does not match {self.n_modes} modes")
        dtype = complex if np.iscomplexobj(h) else float
        out = sp.csr_matrix((self.dim, self.dim), dtype=dtype)
        for p, q in zip(*np.nonzero(h)):
            out = out + h[p, q] * self.hopping(int(p), int(q))
        return out.tocsr()

    def number_diagonal(self, mode_energies: np.ndarray) -> np.ndarray:
        """Diagonal of sum_j e_j n_j in the occupation basis"""
        return self.occupations @ np.asarray(mode_energies, dtype=float)

    def pauli_z(self) -> np.ndarray:
        """Per-determinant values of Z_j = 1 - 2 n_j, shape (dim, n_modes)"""
        return 1.0 - 2.0 * self.occupations

    def particle_number(self) -> np.ndarray:
        return self.occupations.sum(axis=1)


def spin_orbital_matrix(h_spatial: np.ndarray) -> np.ndarray:
    """Spin-free N x N matrix placed on both spin blocks"""
    return np.kron(np.eye(2), np.asarray(h_spatial))


def molecular_hamiltonian(h: ActiveSpaceHamiltonian, space: Optional[FockSpace] = None) -> sp.csr_matrix:
    """H = e_core + sum t_pq E_pq + 1/2 sum v_pqrs (E_pq E_rs - delta_qr E_ps)"""
    n = h.n_orb
    space = space or FockSpace(2 * n)
    if space.n_modes != 2 * n:
        raise ValidationError(f"Fock space has {space.n_modes} modes, expected {2 * n}")
    excitations = {}
    for p in range(n):
        for q in range(n):
            excitations[p, q] = (space.hopping(p, q) + space.hopping(n + p, n + q)).tocsr()
    t_eff = h.t - 0.5 * np.einsum("pqqs->ps", h.v)
    out = h.e_core * sp.identity(space.dim, format="csr")
    for (p, q), e_pq in excitations.items():
        if t_eff[p, q] != 0.0:
            out = out + t_eff[p, q] * e_pq
        coupled = sp.csr_matrix((space.dim, space.dim))
        for (r, s), e_rs in excitations.items():
            if h.v[p, q, r, s] != 0.0:
                coupled = coupled + h.v[p, q, r, s] * e_rs
        if coupled.nnz:
            out = out + 0.5 * (e_pq @ coupled)
    return out.tocsr()


def rotation_generator(u: np.ndarray) -> np.ndarray:
    """Anti-Hermitian kappa with expm(kappa) = u, from the complex Schur form of u"""
    u = np.asarray(u, dtype=complex)
    defect = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if defect > 1e-10:
        raise ValidationError(f"rotation is not unitary (defect {defect:.3e})")
    t, q = scipy.linalg.schur(u, output="complex")
    phases = np.angle(np.diag(t))
    return q @ np.diag(1j * phases) @ q.conj().T


def lift_orbital_rotation(u: np.ndarray, space: FockSpace) -> sp.csr_matrix:
    """Many-body generator K with e^K a_p^dagger e^-K = sum_q u_qp a_q^dagger.

    A spatial N x N rotation acts identically on both spin blocks.
    """
    u = np.asarray(u)
    if u.shape[0] * 2 == space.n_modes:
        u = spin_orbital_matrix(u)
    kappa = rotation_generator(u)
    kappa[np.abs(kappa) < 1e-15] = 0.0
    return space.one_body_operator(kappa)


def apply_rotation(generator: sp.csr_matrix, state: np.ndarray, inverse: bool = False) -> np.ndarray:
    return expm_multiply(-generator if inverse else generator, np.asarray(state, dtype=complex))


def dense_rotation(generator: sp.csr_matrix) -> np.ndarray:
    return scipy.linalg.expm(generator.toarray())


def spin_operators(n_orb: int, space: Optional[FockSpace] = None) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
    """S_z and S^2 over 2N spin orbitals"""
    space = space or FockSpace(2 * n_orb)
    s_plus = sp.csr_matrix((space.dim, space.dim))
    s_z = sp.csr_matrix((space.dim, space.dim))
    for p in range(n_orb):
        s_plus = s_plus + space.hopping(p, n_orb + p)
        s_z = s_z + 0.5 * (space.hopping(p, p) - space.hopping(n_orb + p, n_orb + p))
    s_minus = s_plus.T.conj()
    s2 = s_minus @ s_plus + s_z @ s_z + s_z
    return s_z.tocsr(), s2.tocsr()


def check_hermitian(matrix: np.ndarray, tol: float = 1e-10, what: str = "operator") -> np.ndarray:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"{what} must be square, got {matrix.shape}")
    deviation = max_non_hermiticity(matrix)
    if deviation > tol:
        raise DomainError(f"{what} is not Hermitian (deviation {deviation:.3e})")
    return matrix


def lift_spatial_matrices(space: FockSpace, matrices: Sequence[np.ndarray]) -> List[sp.csr_matrix]:
    """Spin-free one-body operators for each N x N matrix"""
    return [space.one_body_operator(spin_orbital_matrix(m)) for m in matrices]
