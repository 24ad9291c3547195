"""Configuration management for sumdiff."""

import copy
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class ConfigManager:
    """Reads the optional JSON configuration file and merges it over defaults."""

    DEFAULT_CONFIG = {
        "optimizer": {
            "starts": 64,
            "seed": 0,
            "max_evals": 20000,
            "tol": 1e-12,
            "softmin_temperature": None,
            "workers": 1,
        },
        "blowup": {
            "exact_threshold": 5000,
        },
        "search": {
            "budget": 2000000,
            "workers": 1,
            "fingerprint_dedup": False,
        },
        "paper": {
            "tol": 5e-5,
        },
    }

    def __init__(self, config_file: Optional[Path] = None):
        """
        Initialize config manager.

        Args:
            config_file: Path of the JSON file; defaults to ~/.sumdiff/config.json
        """
        self.config_file = Path(config_file) if config_file else Path.home() / ".sumdiff" / "config.json"
        self._config: Optional[Dict[str, Any]] = None

    def load_config(self) -> Dict[str, Any]:
        """Load configuration from file, falling back to defaults. Never writes."""
        if self._config is not None:
            return self._config

        self._config = copy.deepcopy(self.DEFAULT_CONFIG)
        if not self.config_file.exists():
            return self._config

        try:
            with open(self.config_file, 'r') as f:
                user_config = json.load(f)
        except (json.JSONDecodeError, IOError) as e:
            logger.warning("Could not load config %s: %s. Using defaults.", self.config_file, e)
            return self._config

        if not isinstance(user_config, dict):
            logger.warning("Config %s is not a JSON object. Using defaults.", self.config_file)
            return self._config

        # Merge section by section so partial sections keep their defaults
        for section, values in user_config.items():
            if isinstance(values, dict) and isinstance(self._config.get(section), dict):
                self._config[section] = {**self._config[section], **values}
            else:
                self._config[section] = values
        return self._config

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value (a copy, so callers cannot mutate the cache)."""
        config = self.load_config()
        return copy.deepcopy(config.get(key, default))

    def get_option(self, section: str, key: str) -> Any:
        """Get one key of a section, falling back to the built-in default."""
        values = self.get(section, {}) or {}
        return values.get(key, self.DEFAULT_CONFIG[section][key])


# Global config manager instance
_config_manager: Optional[ConfigManager] = None


def get_config_manager() -> ConfigManager:
    """Get the global config manager instance."""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def reset_config_manager(config_file: Optional[Path] = None) -> ConfigManager:
    """Replace the global instance (used by the CLI and tests to point at another file)."""
    global _config_manager
    _config_manager = ConfigManager(config_file)
    return _config_manager
