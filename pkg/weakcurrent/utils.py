# weakcurrent/utils.py

import logging
import os
import sys
from typing import Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def ensure_parent_dir_exists(path: str):
    """
    Ensures that the directory holding an output file exists; creates it if it doesn't.
    """
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(parent):
        os.makedirs(parent)
        logger.info("Created output directory: %s", parent)


def write_artifact(text: str, path: Optional[str] = None):
    """Write text to path, or to stdout when path is None or '-'."""
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        sys.stdout.flush()
        return
    ensure_parent_dir_exists(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info("Wrote %s", path)


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs at least two strictly positive points")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def make_grid(lo: float, hi: float, steps: int, log: bool = False) -> np.ndarray:
    """steps points from lo to hi inclusive, geometric when log is set."""
    if steps < 1:
        raise ValueError(f"grid needs at least one step, got {steps}")
    if steps == 1:
        return np.array([float(lo)])
    if log:
        if not (lo > 0 and hi > 0):
            raise ValueError("a logarithmic grid needs positive bounds")
        return np.geomspace(lo, hi, steps)
    return np.linspace(lo, hi, steps)
