"""
LCU coefficient convention shared by every 1-norm in the package.

The Hamiltonian is written in Pauli form. Occupation numbers of a rotated
orbital k with spin gamma become n = (1 - Z_k,gamma) / 2 and every term is a
product of at most two such unitaries:

    H = E_id + H_0 + sum_l H_l
    H_0 = -1/2 sum_k z0_k sum_gamma Z_k,gamma
    H_l = 1/8 sum_{(k,gamma) != (l,tau)} Z^l_kl Z_k,gamma Z_l,tau

The one-body matrix that enters H_0 is pauli_one_body(h); the Z-independent
pieces collect into the identity shift E_id, which is removed from the
Hamiltonian together with every window edge before block encoding.
"""

import json
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from models.errors import DomainError, ValidationError
from models.factorization import CdfFactorization, ShiftedLcu, ThcFactorization
from models.hamiltonian import ActiveSpaceHamiltonian
from models.spectral import SpectralWindow

logger = logging.getLogger(__name__)

Factorization = Union[ThcFactorization, CdfFactorization]


def pauli_one_body(h: ActiveSpaceHamiltonian) -> np.ndarray:
    """T_pq = t_pq - 1/2 sum_r v_prrq + sum_r v_pqrr"""
    return h.t - 0.5 * np.einsum("prrq->pq", h.v) + np.einsum("pqrr->pq", h.v)


def _core_norm(z: np.ndarray) -> float:
    off = np.abs(z).sum() - np.abs(np.diag(z)).sum()
    return 0.5 * off + 0.25 * np.abs(np.diag(z)).sum()


def one_norm(f: Factorization, one_body: Optional[np.ndarray] = None) -> float:
    """Sum of absolute LCU coefficients, identity term excluded.

    For CDF the one-body part is taken from the factorization itself
    (z0); `one_body` overrides it. THC has no one-body part of its own, so
    the eigenvalue magnitudes of `one_body` are added when given.
    """
    if isinstance(f, CdfFactorization):
        lam = float(np.abs(f.z0).sum()) if one_body is None else float(np.abs(np.linalg.eigvalsh(one_body)).sum())
        lam += sum(_core_norm(frag.z) for frag in f.fragments)
        return lam
    if isinstance(f, ThcFactorization):
        lam = 0.0 if one_body is None else float(np.abs(np.linalg.eigvalsh(one_body)).sum())
        if f.rank:
            lam += _core_norm(f.z)
        return lam
    raise ValidationError(f"unsupported factorization type {type(f).__name__}")


def identity_shift(f: Factorization, e_core: float = 0.0, one_body: Optional[np.ndarray] = None) -> float:
    """E_id: everything in the Pauli-form Hamiltonian that is proportional to the identity"""
    if isinstance(f, CdfFactorization):
        z0_sum = float(f.z0.sum()) if one_body is None else float(np.trace(one_body))
        cores = [frag.z for frag in f.fragments]
    else:
        z0_sum = 0.0 if one_body is None else float(np.trace(one_body))
        cores = [f.z] if f.rank else []
    shift = e_core + z0_sum
    for z in cores:
        shift += -0.5 * z.sum() + 0.25 * np.trace(z)
    return float(shift)


def shift_lcu(lam: float, e_th: float) -> ShiftedLcu:
    if lam < 0:
        raise DomainError(f"1-norm must be non-negative, got {lam}")
    return ShiftedLcu(lam=lam, e_th=e_th, lambda_prime=lam + abs(e_th))


def shift_window(window: SpectralWindow, shift: float) -> SpectralWindow:
    """Move every edge by the same global shift; membership of each eigenvalue is unchanged"""
    return window.shifted(shift)


def save_factorization(path: Union[str, Path], f: Factorization) -> None:
    Path(path).write_text(json.dumps(f.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
    logger.info(f"Saved {f.to_dict()['method']} factorization to {path}")


def load_factorization(path: Union[str, Path]) -> Factorization:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    method = data.get("method")
    if method == "thc":
        return ThcFactorization.from_dict(data)
    if method == "cdf":
        return CdfFactorization.from_dict(data)
    raise ValidationError(f"{path}: unknown factorization method {method!r}")
