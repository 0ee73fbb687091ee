"""
Position-grid representation of a spin-vibronic Hamiltonian

    H = I_el (x) (T_nuc + V_0) + W(Q)
    T_nuc = sum_r omega_r / 2 p_r^2,  V_0 = sum_r omega_r / 2 Q_r^2
    W_ij(Q) = lambda_ij + sum_r a_r,ij Q_r + sum_rs b_rs,ij Q_r Q_s

in dimensionless mass-weighted coordinates. Each mode carries K points
Q_j = -L + 2 L j / K; the kinetic term is applied in momentum space through
an FFT over the mode axes. Wavefunctions have shape (n_el, K, ..., K) and
are normalized with the plain sum of squared moduli.
"""

import json
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import scipy.linalg
from scipy.fft import fftn, ifftn
from scipy.sparse.linalg import LinearOperator, eigsh

from models.dynamics import VibronicModel
from models.errors import CapacityError, DomainError

logger = logging.getLogger(__name__)

DENSE_GROUND_LIMIT = 2048


def load_vibronic_model(path: Union[str, Path]) -> VibronicModel:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    model = VibronicModel.from_dict(data)
    logger.info(f"Loaded vibronic model from {path}: {model.n_el} states, {model.n_modes} modes, K={model.grid_k}")
    return model


class VibronicGrid:
    """Grid Hamiltonian handle built from a VibronicModel"""

    def __init__(self, model: VibronicModel, dim_cap: int = 1 << 22):
        self.model = model
        k, m = model.grid_k, model.n_modes
        self.shape = (model.n_el,) + (k,) * m
        self.dim = int(np.prod(self.shape))
        if self.dim > dim_cap:
            raise CapacityError(f"grid dimension {self.dim} exceeds the cap of {dim_cap}")
        extent = model.q_extent
        self.q = -extent + 2.0 * extent * np.arange(k) / k
        self.p = 2.0 * np.pi * np.fft.fftfreq(k, d=2.0 * extent / k)
        self.mode_axes = tuple(range(1, m + 1))

        mesh = np.meshgrid(*([self.q] * m), indexing="ij") if m else []
        pmesh = np.meshgrid(*([self.p] * m), indexing="ij") if m else []
        self.kinetic = sum(0.5 * w * pr ** 2 for w, pr in zip(model.omegas, pmesh)) if m else np.zeros(())
        self.v0 = sum(0.5 * w * qr ** 2 for w, qr in zip(model.omegas, mesh)) if m else np.zeros(())

        coupling = np.zeros((model.n_el, model.n_el) + (k,) * m, dtype=complex)
        coupling += model.lambda0.reshape(model.lambda0.shape + (1,) * m)
        if model.degree >= 1:
            for r in range(m):
                coupling += model.a_lin[r].reshape((model.n_el, model.n_el) + (1,) * m) * mesh[r]
        if model.degree >= 2:
            for r in range(m):
                for s in range(m):
                    coupling += model.b_quad[r, s].reshape((model.n_el, model.n_el) + (1,) * m) * mesh[r] * mesh[s]
        self.coupling = coupling
        logger.debug(f"Vibronic grid built: shape {self.shape}, dim {self.dim}")

    @property
    def triplet_mask(self) -> np.ndarray:
        return self.model.triplet_mask

    def kinetic_apply(self, psi: np.ndarray, phase: Optional[complex] = None) -> np.ndarray:
        if not self.mode_axes:
            return np.zeros_like(psi) if phase is None else psi
        spectrum = fftn(psi, axes=self.mode_axes)
        factor = self.kinetic if phase is None else np.exp(phase * self.kinetic)
        return ifftn(factor * spectrum, axes=self.mode_axes)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex).reshape(self.shape)
        out = self.kinetic_apply(psi) + self.v0 * psi
        out += np.einsum("ij...,j...->i...", self.coupling, psi)
        return out

    def dense_hamiltonian(self, limit: int = 4096) -> np.ndarray:
        if self.dim > limit:
            raise CapacityError(f"grid dimension {self.dim} too large for a dense Hamiltonian (limit {limit})")
        eye = np.eye(self.dim, dtype=complex)
        h = np.column_stack([self.apply(eye[:, c]).ravel() for c in range(self.dim)])
        return 0.5 * (h + h.conj().T)

    def ground_energy(self) -> float:
        if self.dim <= DENSE_GROUND_LIMIT:
            return float(scipy.linalg.eigvalsh(self.dense_hamiltonian(DENSE_GROUND_LIMIT))[0])
        op = LinearOperator((self.dim, self.dim), matvec=lambda v: self.apply(v).ravel(), dtype=complex)
        vals = eigsh(op, k=1, which="SA", return_eigenvectors=False)
        return float(vals[0])

    def energy_expectation(self, psi: np.ndarray) -> float:
        psi = np.asarray(psi, dtype=complex).reshape(self.shape)
        return float(np.vdot(psi, self.apply(psi)).real / np.vdot(psi, psi).real)

    def product_state(self, electronic_state: int) -> np.ndarray:
        """|i> times the harmonic ground state of every mode"""
        if not 0 <= electronic_state < self.model.n_el:
            raise DomainError(f"electronic state {electronic_state} out of range 0..{self.model.n_el - 1}")
        psi = np.zeros(self.shape, dtype=complex)
        gauss = np.exp(-0.5 * self.q ** 2)
        mode_part = np.ones(())
        for _ in self.mode_axes:
            mode_part = np.multiply.outer(mode_part, gauss)
        psi[electronic_state] = mode_part
        return psi / np.linalg.norm(psi)

    def triplet_population(self, psi: np.ndarray) -> float:
        psi = np.asarray(psi).reshape(self.shape)
        return float(np.sum(np.abs(psi[self.triplet_mask]) ** 2))


def build_vibronic(model: VibronicModel, dim_cap: int = 1 << 22) -> VibronicGrid:
    return VibronicGrid(model, dim_cap)
