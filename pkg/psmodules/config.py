"""
config.py – psmodules Configuration
===================================

Defaults live here; ``config.yaml`` (or the file named by PSMODULES_CONFIG)
overrides them. Environment variables are read from .env when present.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

# Load environment variables from .env
load_dotenv()

# === PROJECT ROOT (fixtures, default config) ===
PROJECT_ROOT = Path(__file__).parent.parent.resolve()

CONFIG_FILE = Path(os.getenv("PSMODULES_CONFIG", str(PROJECT_ROOT / "config.yaml")))
FIXTURES_DIR = Path(os.getenv("PSMODULES_FIXTURES", str(PROJECT_ROOT / "fixtures")))
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# === ARITHMETIC LIMITS ===
SATURATION_CAP = 64  # colon steps before a saturation is declared runaway
RESIDUE_BRUTEFORCE_LIMIT = 2_500  # largest residue ring scanned element by element
LOCAL_POWER_CAP = 2  # powers of the S-product searched for divisors in A_S

# === CERTIFICATES & EXIT CODES ===
SCHEMA_VERSION = 1
EXIT_FOUND = 0
EXIT_REFUTED = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3

DEFAULT_CONFIG: Dict[str, Any] = {
    "log_level": LOG_LEVEL,
    "fixtures_dir": str(FIXTURES_DIR),
    "suite_file": "paper_suite.yaml",
    "workers": 4,
    "envelope": {
        "norm_bound": 9,
        "height": 1,
        "max_steps": 3,
    },
    "sample": {
        "seed": 20240501,
        "count": 50,
        "norm_bound": 20,
        "budget": 50,
    },
    "atoms": {
        "norm_bound": 9,
    },
}


def load_config(path: Optional[Path] = None) -> Dict[str, Any]:
    """Merge the YAML file (if any) over DEFAULT_CONFIG, one level deep."""
    path = Path(path) if path is not None else CONFIG_FILE
    merged = {k: (dict(v) if isinstance(v, dict) else v) for k, v in DEFAULT_CONFIG.items()}
    if not path.exists():
        return merged
    with open(path, "r") as f:
        loaded = yaml.safe_load(f) or {}
    for key, value in loaded.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key].update(value)
        else:
            merged[key] = value
    return merged


def setup_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO),
        format="%(asctime)s | %(levelname)s | %(message)s",
        datefmt="%H:%M:%S",
    )
