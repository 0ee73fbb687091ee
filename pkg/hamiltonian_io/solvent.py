"""
Static solvent corrections applied to active-space integrals
"""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from models.errors import DomainError, ValidationError
from models.hamiltonian import ActiveSpaceHamiltonian, SolventModel, max_asymmetry

logger = logging.getLogger(__name__)


def load_solvent(path: Union[str, Path], tol: float = 1e-10) -> SolventModel:
    """Read a solvent description from its JSON structured config"""
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    if data.get("reaction_field") is not None and max_asymmetry(np.asarray(data["reaction_field"])) > tol:
        raise ValidationError(f"{path}: reaction_field is not symmetric")
    for k, mode in enumerate(data.get("modes", [])):
        if max_asymmetry(np.asarray(mode["g"], dtype=float)) > tol:
            raise ValidationError(f"{path}: coupling matrix of mode {k} is not symmetric")
    solvent = SolventModel.from_dict(data)
    logger.info(f"Loaded solvent model kind={solvent.kind} from {path}")
    return solvent


def apply_pcm(h: ActiveSpaceHamiltonian, s: SolventModel) -> ActiveSpaceHamiltonian:
    """Screen the two-body part by 1/epsilon and add the reaction-field one-body term"""
    if s.kind != "pcm_static":
        raise DomainError(f"apply_pcm needs a pcm_static solvent, got {s.kind}")
    if s.epsilon < 1.0:
        raise DomainError(f"dielectric constant must be >= 1, got {s.epsilon}")
    rf = np.zeros_like(h.t) if s.reaction_field is None else s.reaction_field
    if rf.shape != h.t.shape:
        raise ValidationError(f"reaction field shape {rf.shape} does not match t {h.t.shape}")
    logger.debug(f"PCM correction: epsilon={s.epsilon}, |reaction field|={np.linalg.norm(rf):.3e}")
    return h.replace(t=h.t + rf, v=h.v / s.epsilon)


def integrate_out_bosons(h: ActiveSpaceHamiltonian, s: SolventModel) -> ActiveSpaceHamiltonian:
    """t'_pq = t_pq - sum_k (g_k^(pq))^2 / omega_k"""
    if s.kind != "bosonic":
        raise DomainError(f"integrate_out_bosons needs a bosonic solvent, got {s.kind}")
    correction = np.zeros_like(h.t)
    for k, mode in enumerate(s.modes):
        if mode.omega <= 0.0:
            raise DomainError(f"bosonic mode {k} has non-positive frequency {mode.omega}")
        if mode.g.shape != h.t.shape:
            raise ValidationError(f"mode {k} coupling shape {mode.g.shape} does not match t {h.t.shape}")
        if max_asymmetry(mode.g) > 1e-10:
            raise ValidationError(f"coupling matrix of mode {k} is not symmetric")
        correction -= mode.g ** 2 / mode.omega
    logger.debug(f"Bosonic correction over {len(s.modes)} modes, max shift {np.max(np.abs(correction), initial=0.0):.3e}")
    return h.replace(t=h.t + correction)


def apply_solvent(h: ActiveSpaceHamiltonian, s: SolventModel) -> ActiveSpaceHamiltonian:
    if s.kind == "none":
        return h
    if s.kind == "pcm_static":
        return apply_pcm(h, s)
    return integrate_out_bosons(h, s)
