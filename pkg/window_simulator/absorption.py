"""
Exact cumulative absorption of a dense Hamiltonian inside an energy window
"""

import logging
from typing import NamedTuple, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from models.errors import CapacityError, ValidationError
from models.hamiltonian import max_non_hermiticity
from models.spectral import DipoleState, SpectralWindow

logger = logging.getLogger(__name__)

DipoleInput = Union[np.ndarray, Sequence[np.ndarray]]


class Spectrum(NamedTuple):
    energies: np.ndarray
    vectors: np.ndarray
    ground_degenerate: bool


def _check_dense(matrix: np.ndarray, dim: int, dense_cap: int, what: str) -> np.ndarray:
    matrix = np.asarray(matrix)
    if matrix.shape != (dim, dim):
        raise ValidationError(f"{what} has shape {matrix.shape}, expected {(dim, dim)}")
    if dim > dense_cap:
        raise CapacityError(f"dimension {dim} exceeds the dense cap of {dense_cap}")
    if max_non_hermiticity(matrix) > 1e-10:
        raise ValidationError(f"{what} is not Hermitian")
    return matrix


def spectral_decomposition(h_dense: np.ndarray, dense_cap: int = 4096, degeneracy_tol: float = 1e-10) -> Spectrum:
    """Ascending eigenpairs; the ground state is index 0 after the stable sort eigh returns"""
    h_dense = np.asarray(h_dense)
    _check_dense(h_dense, h_dense.shape[0], dense_cap, "Hamiltonian")
    energies, vectors = scipy.linalg.eigh(h_dense)
    degenerate = energies.size > 1 and energies[1] - energies[0] < degeneracy_tol
    if degenerate:
        logger.warning(f"ground state degenerate within {degeneracy_tol:g} "
                       f"(gap {energies[1] - energies[0]:.3e}); using the lowest index")
    return Spectrum(energies, vectors, bool(degenerate))


def dipole_state(h_dense: np.ndarray, d_dense: DipoleInput, dense_cap: int = 4096,
                 degeneracy_tol: float = 1e-10) -> DipoleState:
    """D|E0>/sqrt(N_D) expanded in eigenstates; several components are summed isotropically"""
    spectrum = spectral_decomposition(h_dense, dense_cap, degeneracy_tol)
    dim = spectrum.energies.size
    components = [d_dense] if np.ndim(d_dense) == 2 else list(d_dense)
    ground = spectrum.vectors[:, 0]
    amplitudes = []
    for comp in components:
        comp = _check_dense(comp, dim, dense_cap, "dipole operator")
        amplitudes.append(spectrum.vectors.conj().T @ (comp @ ground))
    amplitudes = np.concatenate(amplitudes)
    norm_d = float(np.vdot(amplitudes, amplitudes).real)
    if norm_d > 0:
        amplitudes = amplitudes / np.sqrt(norm_d)
    return DipoleState(amplitudes=amplitudes, norm_d=norm_d, energies=spectrum.energies,
                       ground_energy=float(spectrum.energies[0]), ground_degenerate=spectrum.ground_degenerate)


def window_mass(state: DipoleState, window: SpectralWindow) -> float:
    inside = (state.energies >= window.e_lo) & (state.energies <= window.e_hi)
    return float(np.sum(state.weights[inside]))


def exact_window_absorption(h_dense: np.ndarray, d_dense: DipoleInput, window: SpectralWindow,
                            dense_cap: int = 4096, degeneracy_tol: float = 1e-10) -> Tuple[float, float]:
    """(A_window, P_window) with A_window the dipole strength into eigenstates inside the window.

    Window edges are compared with eigenvalues of h_dense directly; pass
    H - E_0 to work with excitation energies.
    """
    state = dipole_state(h_dense, d_dense, dense_cap, degeneracy_tol)
    if state.norm_d == 0.0:
        return 0.0, 0.0
    p_window = window_mass(state, window)
    a_window = p_window * state.norm_d
    logger.info(f"Exact window absorption: A={a_window:.6g}, P={p_window:.6g}")
    return a_window, p_window
