"""
Classically prepared singlet and triplet reference states
"""

import logging
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from models.errors import CapacityError, DomainError

logger = logging.getLogger(__name__)


def _dense(op) -> np.ndarray:
    return op.toarray() if sp.issparse(op) else np.asarray(op)


def spin_sector_states(h_many_body, s2, sz, spin: float, m: float, number: Optional[np.ndarray] = None,
                       n_elec: Optional[int] = None, tol: float = 1e-8) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of H restricted to S^2 = s(s+1), S_z = m and, if given, a fixed electron count"""
    s2, sz = _dense(s2), _dense(sz)
    eye = np.eye(s2.shape[0])
    a = s2 - spin * (spin + 1.0) * eye
    b = sz - m * eye
    penalty = a.conj().T @ a + b.conj().T @ b
    if number is not None and n_elec is not None:
        penalty = penalty + np.diag((np.asarray(number, dtype=float) - n_elec) ** 2)
    vals, vecs = scipy.linalg.eigh(0.5 * (penalty + penalty.conj().T))
    basis = vecs[:, vals < tol]
    if basis.shape[1] == 0:
        raise DomainError(f"no states with S={spin}, M={m}, N={n_elec} in this Fock space")
    h = _dense(h_many_body)
    energies, coeffs = scipy.linalg.eigh(basis.conj().T @ h @ basis)
    return energies, basis @ coeffs


def reference_states(h_many_body, s2, sz, m: int = 0, singlet_root: int = 1, number: Optional[np.ndarray] = None,
                     n_elec: Optional[int] = None, dense_cap: int = 4096) -> Tuple[np.ndarray, np.ndarray]:
    """(singlet, triplet): the requested singlet root and the lowest triplet with S_z = m"""
    dim = h_many_body.shape[0]
    if dim > dense_cap:
        raise CapacityError(f"dimension {dim} exceeds the dense cap of {dense_cap}")
    s_energies, singlets = spin_sector_states(h_many_body, s2, sz, 0.0, 0.0, number, n_elec)
    t_energies, triplets = spin_sector_states(h_many_body, s2, sz, 1.0, float(m), number, n_elec)
    root = min(singlet_root, singlets.shape[1] - 1)
    logger.info(f"Reference states: singlet root {root} at {s_energies[root]:.6f}, "
                f"triplet M={m} at {t_energies[0]:.6f}")
    return singlets[:, root].astype(complex), triplets[:, 0].astype(complex)
