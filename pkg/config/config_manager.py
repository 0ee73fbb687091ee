"""
Configuration management for the photosensitizer screening toolkit
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from utils.resource_manager import get_default_config

logger = logging.getLogger(__name__)

ENV_PREFIX = "PHOTOQRE_"
ENV_OVERRIDABLE = ("dense_cap", "fock_mode_cap", "y3_mode_cap", "vibronic_dim_cap")


class ConfigManager:
    """Manages application configuration"""

    def __init__(self, config_file: Optional[str] = None):
        if config_file is None:
            self.config_file = Path(__file__).parent.parent / "config.json"
        else:
            self.config_file = Path(config_file)
        self._config = get_default_config()

    def load_config(self) -> Dict[str, Any]:
        """Load configuration from file, then apply environment overrides"""
        try:
            if self.config_file.exists():
                with open(self.config_file, 'r', encoding='utf-8') as f:
                    loaded_config = json.load(f)
                self._config.update(loaded_config)
                logger.info(f"Configuration loaded from {self.config_file}")
            else:
                logger.info(f"Configuration file {self.config_file} not found, using embedded defaults")
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Error loading configuration: {e}")
            self._config = get_default_config()

        self._apply_env_overrides()
        return self._config.copy()

    def _apply_env_overrides(self) -> None:
        for key in ENV_OVERRIDABLE:
            raw = os.environ.get(ENV_PREFIX + key.upper())
            if raw is None:
                continue
            try:
                self._config[key] = int(raw)
                logger.info(f"Environment override {ENV_PREFIX + key.upper()}={raw}")
            except ValueError:
                logger.warning(f"Ignoring non-integer override {ENV_PREFIX + key.upper()}={raw!r}")

    def save_config(self) -> None:
        """Save current configuration to file"""
        try:
            self.config_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, 'w', encoding='utf-8') as f:
                json.dump(self._config, f, indent=2)
            logger.info(f"Configuration saved to {self.config_file}")
        except OSError as e:
            logger.error(f"Error saving configuration: {e}")

    def get(self, key: str, default=None) -> Any:
        """Get configuration value"""
        return self._config.get(key, default)

    def set(self, key: str, value: Any) -> None:
        """Set configuration value"""
        self._config[key] = value

    def update(self, updates: Dict[str, Any]) -> None:
        """Update multiple configuration values"""
        self._config.update(updates)
