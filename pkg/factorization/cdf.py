"""
Compressed double factorization.

The one-body matrix (Pauli convention) is diagonalized exactly. The
two-body tensor, viewed as a symmetric N^2 x N^2 matrix, is expanded in
fragments sum_kl Z^l_kl (u_k u_k^T) (x) (u_l u_l^T) whose rotations come from
the eigen-matrices of v ordered by |eigenvalue|. For a fixed set of
rotations the cores are found by block-coordinate least squares (the
leaf products of one rotation are orthonormal, so each block update is a
projection). Fragment count L climbs 1, 2, ... until the reconstruction
error is below the threshold; at L = rank(v) the expansion is exact.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from models.errors import DomainError
from models.factorization import CdfFactorization, CdfFragment
from models.hamiltonian import ActiveSpaceHamiltonian
from factorization.lcu import pauli_one_body

logger = logging.getLogger(__name__)


def _proper_rotation(u: np.ndarray) -> np.ndarray:
    if np.linalg.det(u) < 0:
        u = u.copy()
        u[:, 0] *= -1.0
    return u


def _leaf_basis(u: np.ndarray) -> np.ndarray:
    n = u.shape[0]
    return np.einsum("pk,qk->pqk", u, u).reshape(n * n, n)


def _fit_cores(vmat: np.ndarray, rotations: List[np.ndarray], cores: List[np.ndarray],
               sweeps: int, tol: float = 1e-15) -> Tuple[List[np.ndarray], float]:
    bases = [_leaf_basis(u) for u in rotations]
    model = sum(b @ z @ b.T for b, z in zip(bases, cores))
    previous = np.inf
    for _ in range(max(1, sweeps)):
        for idx, b in enumerate(bases):
            model -= b @ cores[idx] @ b.T
            z = b.T @ (vmat - model) @ b
            cores[idx] = 0.5 * (z + z.T)
            model += b @ cores[idx] @ b.T
        error = float(np.linalg.norm(vmat - model))
        if previous - error <= tol * max(1.0, error):
            break
        previous = error
    return cores, float(np.linalg.norm(vmat - model))


def _antisymmetric(params: np.ndarray, n: int) -> np.ndarray:
    k = np.zeros((n, n))
    k[np.triu_indices(n, 1)] = params
    return k - k.T


def _refine_rotations(vmat: np.ndarray, rotations: List[np.ndarray], cores: List[np.ndarray],
                      max_iter: int) -> Tuple[List[np.ndarray], List[np.ndarray], float]:
    n = rotations[0].shape[0]
    n_gen = n * (n - 1) // 2

    def rotated(params):
        return [u @ expm(_antisymmetric(params[i * n_gen:(i + 1) * n_gen], n)) for i, u in enumerate(rotations)]

    def objective(params):
        _, err = _fit_cores(vmat, rotated(params), [z.copy() for z in cores], sweeps=4)
        return err ** 2

    result = minimize(objective, np.zeros(n_gen * len(rotations)), method="L-BFGS-B",
                      options={"maxiter": max_iter})
    new_rotations = rotated(result.x)
    new_cores, err = _fit_cores(vmat, new_rotations, [z.copy() for z in cores], sweeps=max_iter)
    return new_rotations, new_cores, err


def cdf_factorize(h: ActiveSpaceHamiltonian, threshold: float, max_fragments: Optional[int] = None,
                  max_iter: int = 200, refine: bool = False) -> CdfFactorization:
    """Fewest fragments reproducing v to `threshold` in Frobenius norm"""
    if threshold <= 0:
        raise DomainError(f"threshold must be positive, got {threshold}")
    n = h.n_orb
    z0, u0 = np.linalg.eigh(pauli_one_body(h))
    u0 = _proper_rotation(u0)
    if not np.any(h.v):
        return CdfFactorization(u0=u0, z0=z0, fragments=[], frob_error=0.0, threshold=threshold)

    vmat = h.v.reshape(n * n, n * n)
    s, w = np.linalg.eigh(vmat)
    order = np.argsort(-np.abs(s))
    numerical_rank = int(np.sum(np.abs(s) > 1e-14 * np.abs(s).max()))
    limit = numerical_rank if max_fragments is None else min(max_fragments, numerical_rank)

    rotations: List[np.ndarray] = []
    cores: List[np.ndarray] = []
    seeds: List[np.ndarray] = []
    error = np.inf
    for count in range(1, limit + 1):
        k = order[count - 1]
        mat = w[:, k].reshape(n, n)
        coeffs, u = np.linalg.eigh(0.5 * (mat + mat.T))
        u = _proper_rotation(u)
        rotations.append(u)
        # double-factorization core of this eigen-matrix; exact once every eigen-matrix is in
        seeds.append(s[k] * np.outer(coeffs, coeffs))
        warm, warm_error = _fit_cores(vmat, rotations, cores + [seeds[-1].copy()], sweeps=max_iter)
        cold, cold_error = _fit_cores(vmat, rotations, [z.copy() for z in seeds], sweeps=max_iter)
        cores, error = (warm, warm_error) if warm_error <= cold_error else (cold, cold_error)
        if error > threshold and refine:
            rotations, cores, error = _refine_rotations(vmat, rotations, cores, max_iter)
        logger.debug(f"CDF with {count} fragments: Frobenius error {error:.3e}")
        if error <= threshold:
            break

    fragments = [CdfFragment(u=u, z=z) for u, z in zip(rotations, cores)]
    cdf = CdfFactorization(u0=u0, z0=z0, fragments=fragments, frob_error=0.0, threshold=threshold)
    frob = float(np.linalg.norm(h.v - cdf.reconstruct()))
    converged = frob <= threshold
    if converged:
        logger.info(f"CDF converged with {len(fragments)} fragments, error {frob:.3e}")
    else:
        logger.warning(f"CDF fragment ladder exhausted at {len(fragments)} fragments; error {frob:.3e}")
    return CdfFactorization(u0=u0, z0=z0, fragments=fragments, frob_error=frob, threshold=threshold,
                            converged=converged)
