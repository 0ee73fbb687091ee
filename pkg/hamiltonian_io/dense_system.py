"""
Dense many-body matrices for exact simulation.

A system comes either from a JSON file holding the matrices directly

    {"hamiltonian": [[...]], "dipole": [[...]] | [[[...]], [[...]], [[...]]]}

or from integrals lifted into the Fock space of 2N spin orbitals, restricted
to the electron-count sector when the file declares NELEC.
"""

import json
import logging
from pathlib import Path
from typing import List, NamedTuple, Optional, Union

import numpy as np

from models.errors import CapacityError, IntegralFormatError, ValidationError
from models.hamiltonian import LoadedIntegrals, max_asymmetry
from utils.fock_space import FockSpace, lift_spatial_matrices, molecular_hamiltonian

logger = logging.getLogger(__name__)


class DenseSystem(NamedTuple):
    hamiltonian: np.ndarray
    dipole: List[np.ndarray]
    source: str


def _symmetric(matrix, what: str, tol: float) -> np.ndarray:
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{what} must be square, got shape {arr.shape}")
    if max_asymmetry(arr) > tol:
        raise ValidationError(f"{what} is not symmetric (deviation {max_asymmetry(arr):.3e})")
    return 0.5 * (arr + arr.T)


def load_dense_system(path: Union[str, Path], tol: float = 1e-10) -> DenseSystem:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise IntegralFormatError(f"{path}: malformed JSON ({e})") from e
    if "hamiltonian" not in data or "dipole" not in data:
        raise IntegralFormatError(f"{path}: a dense system needs 'hamiltonian' and 'dipole' entries")
    h = _symmetric(data["hamiltonian"], "hamiltonian", tol)
    raw = np.asarray(data["dipole"], dtype=float)
    components = [raw] if raw.ndim == 2 else list(raw)
    dipole = [_symmetric(c, f"dipole component {i}", tol) for i, c in enumerate(components)]
    if any(c.shape != h.shape for c in dipole):
        raise ValidationError("dipole and Hamiltonian dimensions differ")
    logger.info(f"Loaded dense system from {path}: dim {h.shape[0]}, {len(dipole)} dipole component(s)")
    return DenseSystem(hamiltonian=h, dipole=dipole, source=str(path))


def many_body_system(loaded: LoadedIntegrals, mode_cap: int = 14, dense_cap: int = 4096,
                     sector: Optional[int] = None) -> DenseSystem:
    """Dense H and dipole components over the (sector-restricted) Fock space"""
    if loaded.dipole is None:
        raise IntegralFormatError("integral file has no dipole section")
    h = loaded.hamiltonian
    sector = h.n_elec if sector is None else sector
    space = FockSpace(2 * h.n_orb, sector=sector, mode_cap=mode_cap)
    if space.dim > dense_cap:
        raise CapacityError(f"Fock-space dimension {space.dim} exceeds the dense cap of {dense_cap}")
    h_dense = molecular_hamiltonian(h, space).toarray()
    dipole = [op.toarray() for op in lift_spatial_matrices(space, loaded.dipole.d)]
    logger.info(f"Many-body system: {2 * h.n_orb} spin orbitals, sector {sector}, dim {space.dim}")
    return DenseSystem(hamiltonian=0.5 * (h_dense + h_dense.T), dipole=dipole, source="integrals")
