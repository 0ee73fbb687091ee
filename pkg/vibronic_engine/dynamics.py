"""
Second-order split-operator propagation and triplet-population rate extraction.

One step applies the potential fragments for dt/2, the kinetic fragment for
dt and the potential fragments again in reverse order. Potential fragments
are the diagonal part (V_0 + W_ii) and one fragment per coupled state pair
(i, j) whose 2 x 2 off-diagonal block is exponentiated in closed form:

    exp(-i s [[0, w], [w*, 0]]) = cos(s|w|) - i s sinc(s|w|) [[0, w], [w*, 0]]
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from models.dynamics import PopulationTrace, RateFit
from models.errors import DomainError, PropagationError
from vibronic_engine.grid_model import VibronicGrid

logger = logging.getLogger(__name__)


class SplitOperator:
    def __init__(self, grid: VibronicGrid, dt: float):
        if dt <= 0:
            raise DomainError(f"time step must be positive, got {dt}")
        self.grid = grid
        self.dt = dt
        n = grid.model.n_el
        diag = np.stack([grid.v0 + grid.coupling[i, i].real for i in range(n)])
        self.half_diagonal = np.exp(-0.5j * dt * diag)
        self.pairs: List[Tuple[int, int, np.ndarray, np.ndarray, np.ndarray]] = []
        for i in range(n):
            for j in range(i + 1, n):
                w = grid.coupling[i, j]
                if not np.any(w):
                    continue
                s = 0.5 * dt
                mod = np.abs(w)
                cos_part = np.cos(s * mod)
                sinc = -1j * s * np.sinc(s * mod / np.pi)
                self.pairs.append((i, j, cos_part, sinc * w, sinc * np.conj(w)))
        kinetic_max = float(np.max(grid.kinetic)) if grid.mode_axes else 0.0
        if dt * kinetic_max > np.pi:
            logger.warning(f"dt={dt} resolves kinetic phases only up to pi/dt; grid cutoff energy {kinetic_max:.3g}")

    def _potential(self, psi: np.ndarray, reverse: bool) -> np.ndarray:
        if not reverse:
            psi = self.half_diagonal * psi
        for i, j, c, s_ij, s_ji in (reversed(self.pairs) if reverse else self.pairs):
            psi_i, psi_j = psi[i].copy(), psi[j]
            psi[i] = c * psi_i + s_ij * psi_j
            psi[j] = c * psi_j + s_ji * psi_i
        if reverse:
            psi = self.half_diagonal * psi
        return psi

    def step(self, psi: np.ndarray) -> np.ndarray:
        psi = self._potential(np.array(psi, dtype=complex), reverse=False)
        psi = self.grid.kinetic_apply(psi, phase=-1j * self.dt)
        return self._potential(psi, reverse=True)


def propagate(grid: VibronicGrid, psi0: np.ndarray, dt: float, n_steps: int, record_every: int = 1,
              norm_drift_tol: float = 1e-6, record_energy: bool = False) -> PopulationTrace:
    """Triplet population P_T(t) along a split-operator trajectory"""
    if n_steps < 0 or record_every < 1:
        raise DomainError("n_steps must be >= 0 and record_every >= 1")
    splitter = SplitOperator(grid, dt)
    psi = np.asarray(psi0, dtype=complex).reshape(grid.shape)
    initial_norm = np.linalg.norm(psi)
    times, populations, energies = [0.0], [grid.triplet_population(psi)], []
    if record_energy:
        energies.append(grid.energy_expectation(psi))
    drift = 0.0
    for n in range(1, n_steps + 1):
        psi = splitter.step(psi)
        if n % record_every and n != n_steps:
            continue
        drift = max(drift, abs(np.linalg.norm(psi) - initial_norm))
        if drift > norm_drift_tol:
            raise PropagationError(f"norm drift {drift:.3e} exceeds {norm_drift_tol:g} at step {n}")
        times.append(n * dt)
        populations.append(grid.triplet_population(psi))
        if record_energy:
            energies.append(grid.energy_expectation(psi))
    logger.info(f"Propagated {n_steps} steps of dt={dt}: final P_T={populations[-1]:.6e}, norm drift {drift:.2e}")
    return PopulationTrace(times=np.array(times), p_t=np.array(populations), norm_drift=drift,
                           energies=np.array(energies) if record_energy else None)


def extract_rate(trace: PopulationTrace, fit_window: Optional[Tuple[float, float]] = None,
                 min_r_squared: float = 0.9) -> RateFit:
    """Slope of P_T against t through the origin over the fit window"""
    times, p_t = np.asarray(trace.times), np.asarray(trace.p_t)
    t0, t1 = (times[0], times[-1]) if fit_window is None else fit_window
    if t0 < times[0] or t1 > times[-1] or t1 <= t0:
        raise DomainError(f"fit window [{t0}, {t1}] is not inside the trace [{times[0]}, {times[-1]}]")
    mask = (times >= t0) & (times <= t1) & (times > 0)
    if mask.sum() < 2:
        raise DomainError("fit window holds fewer than two nonzero times")
    t, p = times[mask], p_t[mask]
    slope = float(np.dot(t, p) / np.dot(t, t))
    residual = p - slope * t
    total = float(np.sum((p - p.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(residual ** 2)) / total if total > 0 else (1.0 if not np.any(residual) else 0.0)
    notes = []
    if np.max(p) >= 0.1:
        notes.append("P_T exceeds 0.1 inside the fit window")
    flagged = r_squared < min_r_squared
    if flagged:
        notes.append(f"R^2 {r_squared:.3f} below {min_r_squared}")
        logger.warning(f"Rate fit flagged: R^2={r_squared:.3f}")
    return RateFit(k_isc_vib=slope, r_squared=r_squared, n_points=int(mask.sum()), flagged=flagged, notes=notes)
