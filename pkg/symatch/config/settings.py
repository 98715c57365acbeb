"""
Symatch Configuration Settings
Central configuration management for decoders, analyses and benchmarks
"""

import copy
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

# Application Information
APP_NAME = "Symatch"
APP_VERSION = "0.3.1"
APP_AUTHOR = "Symatch Development Team"

# Directories
HOME_DIR = Path.home()
CONFIG_DIR = HOME_DIR / ".config" / "symatch"
CACHE_DIR = HOME_DIR / ".cache" / "symatch"
DATA_DIR = HOME_DIR / ".local" / "share" / "symatch"
RESULTS_DIR = DATA_DIR / "results"

# Configuration Files
USER_CONFIG_FILE = CONFIG_DIR / "config.yaml"
LOG_FILE = DATA_DIR / "symatch.log"
BUNDLED_CODES_FILE = Path(__file__).parent / "codes.yaml"

# Environment
THREADS_ENV_VAR = "SYMATCH_THREADS"

# Belief propagation (keys mirror the option names used by the ldpc package)
BP_DEFAULTS = {
    "bp-method": "minsum",
    "max-iters": 1000,
    "ms-scaling-factor": 0.0,  # 0 selects the adaptive factor 1 - 2^-t
    "prior": None,              # None: 3/n for exhaustive runs, p for sweeps
}
BP_POSTERIOR_FLOOR = 1e-12

# Matching
MATCHING_DEFAULTS = {
    "w-min": 1e-3,
    "w-max": 20.0,
    "hyperedge-weighting": "full",   # full | divided
    "brute-force-defects": 8,
}

# Decoder pipelines
PIPELINE_DEFAULTS = {
    "variant": "symatch",
    "epsilon": 0.5,
    "bp-shortcut": False,
}

# Cylinder trick
CYLINDER_DEFAULTS = {
    "max-doublings": 3,
}

# Symmetry engine
SYMMETRY_DEFAULTS = {
    "max-generators": 12,
    "infinite-order-bound": 1024,
}

# Topology analyzer
TOPOLOGY_DEFAULTS = {
    "order-cap": 4096,
    "max-width-growth": 6,
    "length-to-width": 3,
}

# Benchmark harness
BENCH_DEFAULTS = {
    "exhaustive-budget": 20_000_000,
    "progress-every": 1000,
    "chunk-size": 2000,
}

# Logging Configuration
LOGGING_CONFIG = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "detailed": {
            "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            "datefmt": "%Y-%m-%d %H:%M:%S"
        },
        "simple": {
            "format": "%(levelname)s: %(message)s"
        }
    },
    "handlers": {
        "file": {
            "class": "logging.FileHandler",
            "filename": str(LOG_FILE),
            "formatter": "detailed",
            "level": "DEBUG"
        },
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
            "level": "INFO"
        }
    },
    "loggers": {
        "symatch": {
            "handlers": ["file", "console"],
            "level": "DEBUG",
            "propagate": False
        }
    }
}

# Error Messages for the command line
ERROR_MESSAGES = {
    "unknown_code": "Unknown code '{name}'. Run 'symatch codes list' for the registry.",
    "unknown_variant": "Unknown decoder '{name}'. Available: {available}",
    "budget": "Enumeration of C({n},{w}) = {count} patterns exceeds the budget {budget}; "
              "pass --extended to run it anyway.",
    "config": "Invalid configuration: {detail}",
    "analysis": "Analysis failed: {detail}",
}


def default_config() -> Dict[str, Any]:
    """Return a fresh copy of every default section."""
    return {
        "bp": copy.deepcopy(BP_DEFAULTS),
        "matching": copy.deepcopy(MATCHING_DEFAULTS),
        "pipeline": copy.deepcopy(PIPELINE_DEFAULTS),
        "cylinder": copy.deepcopy(CYLINDER_DEFAULTS),
        "symmetry": copy.deepcopy(SYMMETRY_DEFAULTS),
        "topology": copy.deepcopy(TOPOLOGY_DEFAULTS),
        "bench": copy.deepcopy(BENCH_DEFAULTS),
    }


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
    return base


def load_user_config(path: Optional[Path] = None) -> Dict[str, Any]:
    """
    Load the user configuration and merge it over the defaults.

    Args:
        path: YAML file to read; defaults to ~/.config/symatch/config.yaml

    Returns:
        Merged configuration dictionary

    Raises:
        ValueError: If the file does not hold a mapping
    """
    config = default_config()
    config_path = Path(path) if path is not None else USER_CONFIG_FILE

    if not config_path.exists():
        return config

    with open(config_path, "r", encoding="utf-8") as fh:
        user_config = yaml.safe_load(fh) or {}

    if not isinstance(user_config, dict):
        raise ValueError(f"Configuration file {config_path} must contain a mapping")

    return _merge(config, user_config)


def max_workers_from_env(default: int) -> int:
    """Cap a worker count with SYMATCH_THREADS when it is set."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if not raw:
        return default
    try:
        cap = int(raw)
    except ValueError:
        return default
    return max(1, min(default, cap)) if cap > 0 else default
