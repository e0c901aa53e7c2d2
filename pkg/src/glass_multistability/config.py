# glass_multistability/config.py

"""
Handles loading and validation of the analysis settings.
Tolerances and enumeration caps come from an optional JSON file
(glassnet.json at the project root) and are overridden by environment
variables, which may themselves be supplied through a .env file.
"""

import json
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, List, Tuple

from dotenv import load_dotenv

from .logging_utils import log_event, log_warning

PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent

# --- Defaults ---

DEFAULT_SETTINGS: Dict[str, Any] = {
    "enumeration_cap": 24,          # 2^n subset enumeration
    "signature_cap": 12,            # 3^n row-signature enumeration
    "degeneracy_threshold": 1e-12,  # near-zero margins / attractor components
    "reconstruction_tolerance": 1e-9,
    "convergence_tolerance": 1e-9,
    "condition_warning": 1e12,
    "default_epsilon": 0.5,
    "epsilon_floor": 1e-12,
    "chatter_time": 1e-12,
    "chatter_switches": 3,
}

# Environment variable -> (setting key, parser)
ENV_OVERRIDES: Dict[str, Tuple[str, Callable[[str], Any]]] = {
    "GLASSNET_ENUMERATION_CAP": ("enumeration_cap", int),
    "GLASSNET_SIGNATURE_CAP": ("signature_cap", int),
    "GLASSNET_DEGENERACY_THRESHOLD": ("degeneracy_threshold", float),
    "GLASSNET_RECONSTRUCTION_TOLERANCE": ("reconstruction_tolerance", float),
    "GLASSNET_CONVERGENCE_TOLERANCE": ("convergence_tolerance", float),
    "GLASSNET_CONDITION_WARNING": ("condition_warning", float),
    "GLASSNET_DEFAULT_EPSILON": ("default_epsilon", float),
}

# --- Configuration Loading ---

def load_configuration(config_file_name: str = "glassnet.json") -> Dict[str, Any]:
    """
    Loads settings from the defaults, an optional JSON file and the environment.
    Environment variables override JSON file settings.
    """
    config = dict(DEFAULT_SETTINGS)

    # 1. Load from .env file (for environment variables)
    env_path = PROJECT_ROOT / ".env"
    if env_path.exists():
        load_dotenv(dotenv_path=env_path)
        log_event("Config", f"Loaded environment variables from {env_path}")

    # 2. Base settings from JSON file (optional)
    config_file_path = PROJECT_ROOT / config_file_name
    if config_file_path.exists():
        try:
            with open(config_file_path, "r", encoding="utf-8") as f:
                file_settings = json.load(f)
            unknown = sorted(set(file_settings) - set(DEFAULT_SETTINGS))
            if unknown:
                log_warning("Config", "UnknownKeys", f"Ignoring unknown settings in {config_file_path}", {"keys": unknown})
            config.update({k: v for k, v in file_settings.items() if k in DEFAULT_SETTINGS})
            log_event("Config", f"Loaded base configuration from {config_file_path}")
        except (json.JSONDecodeError, IOError) as e:
            log_warning("Config", "FileError", f"Failed to load or parse {config_file_path}: {e}. Proceeding with defaults.")

    # 3. Environment overrides (prioritized)
    errors: List[str] = []
    for env_name, (key, parser) in ENV_OVERRIDES.items():
        raw = os.getenv(env_name)
        if raw is None or raw == "":
            continue
        try:
            config[key] = parser(raw)
            log_event("Config", f"Loaded {key} from environment ({env_name}).")
        except ValueError:
            errors.append(f"{env_name}={raw!r} is not a valid {parser.__name__}")

    # 4. Validate configuration
    is_valid, validation_errors = validate_config(config)
    errors.extend(validation_errors)
    if errors:
        raise ValueError(f"Configuration errors: {'; '.join(errors)}")

    return config

# --- Configuration Validation ---

def validate_config(config: Dict[str, Any]) -> Tuple[bool, List[str]]:
    """Validates the loaded configuration dictionary."""
    errors = []

    for key in ("enumeration_cap", "signature_cap", "chatter_switches"):
        value = config.get(key)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            errors.append(f"{key} must be a positive integer (got {value!r})")

    if isinstance(config.get("enumeration_cap"), int) and config["enumeration_cap"] > 30:
        errors.append("enumeration_cap above 30 is not supported (2^n subsets)")

    for key in ("degeneracy_threshold", "reconstruction_tolerance", "convergence_tolerance",
                "condition_warning", "epsilon_floor", "chatter_time"):
        value = config.get(key)
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0:
            errors.append(f"{key} must be a positive number (got {value!r})")

    epsilon = config.get("default_epsilon")
    if not isinstance(epsilon, (int, float)) or not 0 < epsilon <= 1:
        errors.append(f"default_epsilon must lie in (0, 1] (got {epsilon!r})")

    return not errors, errors


@lru_cache(maxsize=1)
def _settings() -> Dict[str, Any]:
    return load_configuration()


def get_setting(name: str) -> Any:
    """Returns one validated setting; the configuration is loaded once per process."""
    return _settings()[name]


def reload_settings() -> None:
    """Drops the cached configuration (tests that patch the environment use this)."""
    _settings.cache_clear()
