"""
Configuration Module

This module contains default configuration settings for the freeregress engines,
verifiers and command-line front end.
"""

import json
import logging
import logging.config
import os
from copy import deepcopy
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Base Paths
BASE_DIR = Path(__file__).parent.parent.parent
CONFIG_DIR = BASE_DIR / "config"

# Environment
SEED_ENV_VAR = "FREEREGRESS_SEED"
DEFAULT_SEED = 20130917

# Series Configuration
SERIES_CONFIG = {
    "default_order": 16,
}

# Partition Configuration
PARTITION_CONFIG = {
    "ceiling": 16,
}

# Quadrature and Engine Configuration
QUADRATURE_CONFIG = {
    "nodes": 2048,
    "min_nodes": 16,
    "word_ceiling": 12,
    "cdf_points": 4096,
    "pole_separation": 1e-6,  # fraction of the support width
    "mass_tolerance": 1e-10,
    "stieltjes_epsilon": 1e-6,
}

# Verification Configuration
VERIFY_CONFIG = {
    "order": 10,
    "tolerance_thm1": 1e-8,
    "tolerance_thm2": 1e-7,
    "tolerance_prop": 1e-8,
    "tolerance_cumulant": 1e-9,
    "negative_control_threshold": 1e-3,
    "perturbation": 0.1,
    "tail_terms": 40,
    "tail_order": 6,
    "degree": 6,
    "delta_guard": 1e-6,
}

# Eigenvalue Configuration
EIGEN_CONFIG = {
    "tolerance": 1e-12,
    "max_sweeps": 50,
}

# Monte Carlo Configuration
MONTE_CARLO_CONFIG = {
    "seed": DEFAULT_SEED,
    "dim": 400,
    "trials": 200,
    "max_moment": 4,
    "finite_size_allowance": 10.0,
    "min_eigenvalue": 1e-8,
    "workers": 1,
    "esd_threshold": 0.05,
}

# Logging Configuration
LOGGING_CONFIG = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "standard": {
            "format": "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
        },
    },
    "handlers": {
        "default": {
            "level": "DEBUG",
            "formatter": "standard",
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
        },
    },
    "loggers": {
        "": {
            "handlers": ["default"],
            "level": "WARNING",
            "propagate": True
        },
    },
}

_SECTIONS = {
    "series": SERIES_CONFIG,
    "partitions": PARTITION_CONFIG,
    "quadrature": QUADRATURE_CONFIG,
    "verify": VERIFY_CONFIG,
    "eigen": EIGEN_CONFIG,
    "monte_carlo": MONTE_CARLO_CONFIG,
    "logging": LOGGING_CONFIG,
}


def load_config(config_path: Path = None) -> Dict[str, Any]:
    """
    Load configuration from file or return defaults.

    A JSON file overlays individual keys of the default sections; sections it
    does not mention keep their defaults.

    Args:
        config_path: Optional path to a JSON configuration file

    Returns:
        Dict containing configuration settings
    """
    config = {name: deepcopy(section) for name, section in _SECTIONS.items()}
    if config_path is None:
        return config

    config_path = Path(config_path)
    if not config_path.exists():
        raise ValueError(f"Configuration file not found: {config_path}")

    try:
        overrides = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        logger.error(f"Error reading configuration {config_path}: {e}")
        raise ValueError(f"Invalid configuration file {config_path}: {e}") from e

    for name, values in overrides.items():
        if name not in config:
            raise ValueError(f"Unknown configuration section: {name}")
        if not isinstance(values, dict):
            raise ValueError(f"Configuration section {name} must be an object")
        config[name].update(values)

    return config


def resolve_seed(flag: Optional[int] = None, default: int = DEFAULT_SEED) -> int:
    """
    Pick the Monte Carlo seed: command-line flag, then environment, then default.

    Args:
        flag: Seed given on the command line, if any
        default: Fallback seed

    Returns:
        The seed to use
    """
    if flag is not None:
        return int(flag)

    load_dotenv()
    raw = os.getenv(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from e


def configure_logging(level: str = "WARNING") -> None:
    """Apply LOGGING_CONFIG with the requested root level."""
    config = deepcopy(LOGGING_CONFIG)
    config["loggers"][""]["level"] = level.upper()
    logging.config.dictConfig(config)


def apply_config(config: Dict[str, Any]) -> None:
    """Copy a loaded configuration into the module-level sections the engines read."""
    for name, values in config.items():
        if name not in _SECTIONS:
            raise ValueError(f"Unknown configuration section: {name}")
        _SECTIONS[name].update(values)
