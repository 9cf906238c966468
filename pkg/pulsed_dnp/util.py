###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Utility functions and classes.
"""

# stdlib
import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, Tuple

# third-party
import numpy as np
import psutil
from scipy import optimize

_log = logging.getLogger(__name__)

#: Significant digits for numbers in CSV tables
CSV_DIGITS = 6
CSV_FLOAT_FORMAT = f"%.{CSV_DIGITS}g"


def default_jobs() -> int:
    """Worker count for sweeps: physical cores, falling back to logical ones."""
    n = psutil.cpu_count(logical=False) or psutil.cpu_count(logical=True) or 1
    return max(1, int(n))


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=json_default)


def json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "value"):  # Enum
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def config_hash(obj: Any) -> str:
    """SHA-256 of the canonical JSON of `obj` (first 16 hex digits)."""
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()[:16]


def box_statistics(values: Iterable[float]) -> Dict[str, float]:
    """Quartiles, median, 1.5 IQR whiskers and outlier count of a sample.

    Whiskers end at the most extreme data inside 1.5 IQR of the quartiles.
    """
    x = np.asarray([v for v in values if v is not None and not math.isnan(v)], dtype=float)
    if x.size == 0:
        stats = dict.fromkeys(
            ("q1", "median", "q3", "whisker_low", "whisker_high", "min", "max", "mean"), math.nan
        )
        stats.update(n=0, n_outliers=0)
        return stats
    q1, median, q3 = np.percentile(x, [25, 50, 75])
    iqr = q3 - q1
    inside = x[(x >= q1 - 1.5 * iqr) & (x <= q3 + 1.5 * iqr)]
    return {
        "n": int(x.size),
        "q1": float(q1),
        "median": float(median),
        "q3": float(q3),
        "whisker_low": float(inside.min()),
        "whisker_high": float(inside.max()),
        "min": float(x.min()),
        "max": float(x.max()),
        "mean": float(x.mean()),
        "n_outliers": int(x.size - inside.size),
    }


def histogram_peak(values: Iterable[float], bin_width: float = 0.02, lo: float = 0.0, hi: float = 1.0) -> float:
    """Center of the most populated bin (first one on ties)."""
    x = np.asarray(list(values), dtype=float)
    if x.size == 0:
        return math.nan
    n_bins = int(round((hi - lo) / bin_width))
    counts, edges = np.histogram(np.clip(x, lo, hi), bins=n_bins, range=(lo, hi))
    i = int(np.argmax(counts))
    return float((edges[i] + edges[i + 1]) / 2)


def _gauss(x, amplitude, center, width):
    return amplitude * np.exp(-0.5 * ((x - center) / width) ** 2)


def gaussian_peak(
    values: Iterable[float], bin_width: float = 0.02, lo: float = 0.0, hi: float = 1.0
) -> Tuple[float, float]:
    """Center and width of a normal curve least-squares fitted to the histogram.

    Falls back to the sample mean and standard deviation when there are too
    few distinct values or the fit does not converge.
    """
    x = np.asarray(list(values), dtype=float)
    if x.size == 0:
        return math.nan, math.nan
    mean, std = float(x.mean()), float(x.std())
    if x.size < 3 or std == 0:
        return mean, std
    n_bins = int(round((hi - lo) / bin_width))
    counts, edges = np.histogram(np.clip(x, lo, hi), bins=n_bins, range=(lo, hi))
    centers = (edges[:-1] + edges[1:]) / 2
    p0 = (float(counts.max()), mean, max(std, bin_width))
    try:
        (_, center, width), _ = optimize.curve_fit(_gauss, centers, counts, p0=p0, maxfev=5000)
    except RuntimeError as err:
        _log.warning(f"histogram fit failed, using mean and std: {err}")
        return mean, std
    return float(center), float(abs(width))
