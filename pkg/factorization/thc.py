"""
Tensor hypercontraction of the two-electron tensor.

v_pqrs ~ sum_{mu,nu} X_p,mu X_q,mu Z_mu,nu X_r,nu X_s,nu

Rank ladder: M = max(1, N // 2), doubled while below N(N+1)/2, then a final
rung at M = N(N+1)/2 where the leaves {e_i} and {(e_i + e_j)/sqrt(2)} span
every symmetric matrix and the factorization is exact.

For each rung the leaves are initialized by simultaneous diagonalization of
the leading eigen-matrices of v (when M <= N) or from the spanning set, and
refined by L-BFGS with Z eliminated in closed form (variable projection).
"""

import logging
from typing import List, Optional

import numpy as np
import scipy.linalg
from scipy.optimize import minimize

from models.errors import DomainError, FactorizationIncompleteError
from models.factorization import ThcFactorization
from models.hamiltonian import ActiveSpaceHamiltonian

logger = logging.getLogger(__name__)


def rank_ladder(n_orb: int, max_rank: Optional[int] = None) -> List[int]:
    full = n_orb * (n_orb + 1) // 2
    ladder = []
    m = max(1, n_orb // 2)
    while m < full:
        ladder.append(m)
        m *= 2
    ladder.append(full)
    if max_rank is not None:
        ladder = [m for m in ladder if m <= max_rank] or [max_rank]
    return ladder


def spanning_leaves(n_orb: int) -> np.ndarray:
    cols = [np.eye(n_orb)[:, i] for i in range(n_orb)]
    for i in range(n_orb):
        for j in range(i + 1, n_orb):
            col = np.zeros(n_orb)
            col[[i, j]] = 1.0 / np.sqrt(2.0)
            cols.append(col)
    return np.column_stack(cols)


def _leaf_products(x: np.ndarray) -> np.ndarray:
    n, m = x.shape
    return np.einsum("pm,qm->pqm", x, x).reshape(n * n, m)


def _solve_core(x: np.ndarray, vmat: np.ndarray) -> np.ndarray:
    a_pinv = scipy.linalg.pinv(_leaf_products(x))
    z = a_pinv @ vmat @ a_pinv.T
    return 0.5 * (z + z.T)


def _jennrich_leaves(vmat: np.ndarray, n_orb: int, rank: int, rng: np.random.Generator) -> Optional[np.ndarray]:
    """Common eigenvectors of the leading eigen-matrices of v"""
    s, w = np.linalg.eigh(vmat)
    order = np.argsort(-np.abs(s))[:rank]
    if np.abs(s[order[-1]]) < 1e-12 * max(1.0, np.abs(s).max()):
        return None
    mats = [w[:, k].reshape(n_orb, n_orb) for k in order]
    a = sum(c * m for c, m in zip(rng.standard_normal(rank), mats))
    b = sum(c * m for c, m in zip(rng.standard_normal(rank), mats))
    vals, vecs = scipy.linalg.eig(a @ np.linalg.pinv(b))
    pick = np.argsort(-np.abs(vals))[:rank]
    leaves = np.real(vecs[:, pick])
    return leaves / np.linalg.norm(leaves, axis=0)


def _initial_leaves(vmat: np.ndarray, n_orb: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    if rank <= n_orb:
        leaves = _jennrich_leaves(vmat, n_orb, rank, rng)
        if leaves is not None:
            return leaves
    span = spanning_leaves(n_orb)
    if rank <= span.shape[1]:
        return span[:, :rank]
    extra = rng.standard_normal((n_orb, rank - span.shape[1]))
    return np.column_stack([span, extra / np.linalg.norm(extra, axis=0)])


def _refine(x0: np.ndarray, vmat: np.ndarray, max_iter: int) -> np.ndarray:
    n, m = x0.shape

    def objective(flat):
        x = flat.reshape(n, m)
        a = _leaf_products(x)
        z = _solve_core(x, vmat)
        residual = vmat - a @ z @ a.T
        grad_a = -4.0 * residual @ a @ z
        grad = np.empty_like(x)
        for mu in range(m):
            g = grad_a[:, mu].reshape(n, n)
            grad[:, mu] = (g + g.T) @ x[:, mu]
        return float(np.sum(residual ** 2)), grad.ravel()

    result = minimize(objective, x0.ravel(), jac=True, method="L-BFGS-B", options={"maxiter": max_iter})
    logger.debug(f"THC refinement rank {m}: {result.nit} iterations, residual^2 {result.fun:.3e}")
    return result.x.reshape(n, m)


def _normalized(x: np.ndarray, z: np.ndarray):
    norms = np.linalg.norm(x, axis=0)
    norms[norms == 0.0] = 1.0
    scale = norms ** 2
    z = z * np.outer(scale, scale)
    return x / norms, 0.5 * (z + z.T)


def thc_factorize(h: ActiveSpaceHamiltonian, frob_threshold: float, max_rank: Optional[int] = None,
                  max_iter: int = 500, seed: int = 0, strict: bool = False) -> ThcFactorization:
    """Smallest ladder rank whose reconstruction error is below frob_threshold.

    When the ladder is exhausted the best factorization is returned with
    converged=False, or FactorizationIncompleteError is raised if `strict`.
    """
    if frob_threshold <= 0:
        raise DomainError(f"frob_threshold must be positive, got {frob_threshold}")
    n = h.n_orb
    if not np.any(h.v):
        return ThcFactorization(x=np.zeros((n, 0)), z=np.zeros((0, 0)), rank=0, frob_error=0.0,
                                threshold=frob_threshold)

    vmat = h.v.reshape(n * n, n * n)
    rng = np.random.default_rng(seed)
    full = n * (n + 1) // 2
    best = None
    for rank in rank_ladder(n, max_rank):
        x = _initial_leaves(vmat, n, rank, rng)
        z = _solve_core(x, vmat)
        candidate = ThcFactorization(*_normalized(x, z), rank=rank, frob_error=0.0)
        error = float(np.linalg.norm(h.v - candidate.reconstruct()))
        if error > frob_threshold and rank < full:
            x = _refine(x, vmat, max_iter)
            x, z = _normalized(x, _solve_core(x, vmat))
            candidate = ThcFactorization(x, z, rank=rank, frob_error=0.0)
            error = float(np.linalg.norm(h.v - candidate.reconstruct()))
        logger.debug(f"THC rank {rank}: Frobenius error {error:.3e}")
        if best is None or error < best.frob_error:
            best = ThcFactorization(candidate.x, candidate.z, rank=rank, frob_error=error,
                                    threshold=frob_threshold, converged=error <= frob_threshold)
        if error <= frob_threshold:
            logger.info(f"THC converged at rank {rank} with error {error:.3e}")
            return best

    logger.warning(f"THC rank ladder exhausted; best error {best.frob_error:.3e} at rank {best.rank}")
    if strict:
        raise FactorizationIncompleteError(
            f"no THC rank up to {best.rank} reaches {frob_threshold:.3e}", best=best, achieved_error=best.frob_error)
    return best
