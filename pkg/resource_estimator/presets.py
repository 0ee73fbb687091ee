"""
Estimate sweeps over the active-space sizes of a synthetic preset
"""

import logging
from typing import Any, Dict, List, Optional

from models.errors import ValidationError
from models.resources import ResourceEstimate
from resource_estimator.estimates import (evolution_proxy_estimate, threshold_projection_estimate,
                                          trotter_isc_estimate, trotter_qpe_estimate)
from utils.resource_manager import get_default_config
from utils.synthetic import synthetic_system
from vibronic_engine.resources import vibronic_resources

logger = logging.getLogger(__name__)

FAMILIES = ("absorption", "isc", "trotter", "vibronic")


def _system(preset: Dict[str, Any], n_orb: int):
    return synthetic_system(
        n_orb, int(preset.get("seed", 0)),
        m_rank=int(preset.get("thc_rank_factor", 4) * n_orb),
        n_frag=int(preset.get("cdf_fragment_factor", 1) * n_orb),
        one_body_scale=float(preset.get("one_body_scale", 1.0)),
        two_body_scale=float(preset.get("two_body_scale", 0.5)),
        window_nm=tuple(preset.get("window_nm", (700.0, 850.0))),
        delta=float(preset.get("delta_ha", 0.005)),
    )


def preset_table(preset: Dict[str, Any], family: str, config: Optional[Dict[str, Any]] = None) -> List[ResourceEstimate]:
    """One estimate per active-space size (two per size for the Trotter family: absorption then ISC)"""
    if family not in FAMILIES:
        raise ValidationError(f"unknown estimate family {family!r}; expected one of {FAMILIES}")
    cfg = get_default_config()
    cfg.update(config or {})
    name = preset.get("name", "<unnamed>")

    if family == "vibronic":
        vib = preset.get("vibronic")
        if not vib:
            raise ValidationError(f"preset {name} has no vibronic block")
        return [vibronic_resources(int(vib["n_el"]), int(vib["m_modes"]), int(vib["grid_k"]), int(vib["degree"]),
                                   float(vib["n_steps"]), c_tof=cfg["vibronic_c_tof"], c_anc=cfg["vibronic_c_anc"])]

    sizes = preset.get("active_spaces")
    if not sizes:
        raise ValidationError(f"preset {name} lists no active-space sizes")
    xi = float(preset.get("xi", 0.1))
    common = {"eps_coeff": cfg["eps_coeff"], "eps_rot": cfg["eps_rot"], "d_dets": int(cfg["sos_determinants"])}
    rows: List[ResourceEstimate] = []
    for n_orb in sorted(int(n) for n in sizes):
        system = _system(preset, n_orb)
        if family == "absorption":
            rows.append(threshold_projection_estimate(
                n_orb, system.thc.rank, system.lambda_prime, system.window.delta, eps_h=cfg["eps_h"],
                eps_samp=cfg["eps_samp"], delta_samp=cfg["delta_samp"], batch_b=int(cfg["batch_b"]),
                walk_constants=cfg["walk_constants"], **common))
        elif family == "isc":
            rows.append(evolution_proxy_estimate(
                n_orb, system.thc.rank, system.lambda_prime, system.window.delta, gamma=cfg["gamma_had"],
                s_had=int(cfg["s_had"]), eps_h=cfg["eps_h"], batch_b=int(cfg["batch_b"]),
                walk_constants=cfg["walk_constants"], **common))
        else:
            rows.append(trotter_qpe_estimate(
                system.cdf, system.window, xi=xi, eps_h=cfg["eps_h"], eps_samp=cfg["eps_samp"],
                delta_samp=cfg["delta_samp"], max_step=cfg["trotter_max_step"],
                y3_mode_cap=int(cfg["y3_mode_cap"]), **common))
            rows.append(trotter_isc_estimate(
                system.cdf, system.window, xi=xi, gamma=cfg["gamma_had"], s_had=int(cfg["s_had"]),
                eps_h=cfg["eps_h"], max_step=cfg["trotter_max_step"], y3_mode_cap=int(cfg["y3_mode_cap"]),
                **common))
    logger.info(f"Preset {name}: {len(rows)} {family} estimates")
    return rows
