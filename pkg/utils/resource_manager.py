"""
Resource management for bundled presets, toy inputs and embedded defaults
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

logger = logging.getLogger(__name__)


class ResourceManager:
    """Resolves files shipped under the project's Resources directory"""

    def __init__(self, root: Optional[Path] = None):
        self._root = Path(root) if root is not None else Path(__file__).parent.parent
        logger.debug(f"Resources resolved from: {self._root}")

    def get_resource_path(self, relative_path: Union[str, Path]) -> Path:
        """Get the absolute path to a resource file"""
        return self._root / relative_path

    def resource_exists(self, relative_path: Union[str, Path]) -> bool:
        """Check if a resource file exists"""
        return self.get_resource_path(relative_path).exists()

    def read_resource_text(self, relative_path: Union[str, Path], encoding: str = 'utf-8') -> Optional[str]:
        """Read a text resource file"""
        try:
            resource_path = self.get_resource_path(relative_path)
            if resource_path.exists():
                return resource_path.read_text(encoding=encoding)
            logger.warning(f"Resource not found: {relative_path}")
            return None
        except OSError as e:
            logger.error(f"Error reading resource {relative_path}: {e}")
            return None

    def read_resource_json(self, relative_path: Union[str, Path]) -> Optional[Dict[str, Any]]:
        """Read and decode a JSON resource file"""
        text = self.read_resource_text(relative_path)
        if text is None:
            return None
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            logger.error(f"Malformed JSON resource {relative_path}: {e}")
            return None

    def list_presets(self) -> List[str]:
        """Names of the bundled synthetic presets"""
        preset_dir = self.get_resource_path("Resources/presets")
        if not preset_dir.exists():
            return []
        return sorted(p.stem for p in preset_dir.glob("*.json"))

    def load_preset(self, name: str) -> Optional[Dict[str, Any]]:
        """Load a preset by name, or from an explicit path"""
        candidate = Path(name)
        if candidate.suffix == ".json" and candidate.exists():
            try:
                return json.loads(candidate.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as e:
                logger.error(f"Could not read preset file {candidate}: {e}")
                return None
        return self.read_resource_json(f"Resources/presets/{name}.json")


# Global resource manager instance
resource_manager = ResourceManager()

# Embedded default configuration
DEFAULT_CONFIG_JSON = """
{
    "log_level": "INFO",
    "log_file": "",
    "output_dir": "results",
    "default_seed": 20240611,
    "dense_cap": 4096,
    "fock_mode_cap": 14,
    "y3_mode_cap": 10,
    "vibronic_dim_cap": 4194304,
    "input_symmetry_tol": 1e-10,
    "algebra_tol": 1e-12,
    "degeneracy_tol": 1e-10,
    "success_floor": 1e-6,
    "shot_chunk": 1024,
    "filter_grid_points": 10000,
    "filter_max_degree": 131071,
    "eps_h": 0.01,
    "eps_samp": 0.1,
    "delta_samp": 0.01,
    "eps_coeff": 0.00016,
    "eps_rot": 0.00016,
    "sos_determinants": 10000,
    "batch_b": 1,
    "s_had": 483,
    "gamma_had": 0.7,
    "delta_ha": 0.002,
    "trotter_max_step": 1.0,
    "bias_rtol": 0.01,
    "branch_cut_margin": 1e-6,
    "norm_drift_tol": 1e-6,
    "thc_max_iter": 500,
    "cdf_max_iter": 200,
    "walk_constants": {
        "uniform_prep_per_bit": 3,
        "reflection_extra": 2,
        "control_overhead": 8,
        "aux_flags": 6
    },
    "vibronic_c_tof": 0.45,
    "vibronic_c_anc": 0.33,
    "vibronic_calibration_note": "c_tof, c_anc anchored on N=5, M=19, d=2, K=128, 3.7e5 steps -> 146 logical qubits, 3.1e10 Toffoli"
}
"""


def get_default_config() -> dict:
    """Get the embedded default configuration"""
    try:
        return json.loads(DEFAULT_CONFIG_JSON)
    except json.JSONDecodeError as e:
        logger.error(f"Error parsing embedded config: {e}")
        return {}
