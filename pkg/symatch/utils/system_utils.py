"""
System Utilities
Worker sizing and build provenance for benchmark runs
"""

import logging
import platform
import subprocess
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import psutil

from .. import __version__
from ..config.settings import max_workers_from_env

logger = logging.getLogger(__name__)


def available_workers(requested: Optional[int] = None) -> int:
    """
    Number of worker processes to use.

    Defaults to the physical core count, capped by SYMATCH_THREADS. An
    explicit request is honoured but still capped.
    """
    cores = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    workers = requested if requested else cores
    return max_workers_from_env(max(1, int(workers)))


def git_describe(path: Optional[Path] = None) -> Optional[str]:
    """`git describe --always --dirty` for the source tree, or None outside a checkout."""
    cwd = Path(path) if path is not None else Path(__file__).resolve().parent
    try:
        result = subprocess.run(
            ['git', 'describe', '--always', '--dirty'],
            cwd=cwd, capture_output=True, text=True, timeout=10,
        )
    except (FileNotFoundError, subprocess.TimeoutExpired) as e:
        logger.debug(f"git describe unavailable: {e}")
        return None
    if result.returncode != 0:
        return None
    return result.stdout.strip() or None


def provenance() -> Dict[str, Any]:
    """Build and host facts stored next to every result file."""
    memory = psutil.virtual_memory()
    return {
        'symatch_version': __version__,
        'git_describe': git_describe(),
        'python': platform.python_version(),
        'numpy': np.__version__,
        'platform': platform.platform(),
        'cpu_count': psutil.cpu_count(logical=False),
        'memory_gb': round(memory.total / 1024 ** 3, 1),
    }
