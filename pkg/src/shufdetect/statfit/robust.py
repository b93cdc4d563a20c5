"""Linear-interpolation quantiles and the 1.5-IQR outlier mask."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from ..errors import InsufficientData
from ..features import PerplexityPair

MIN_IQR_SIZE = 8


def quantile(xs, alpha: float) -> float:
    """Order-statistic interpolation at index h = alpha * (n - 1)."""
    arr = np.asarray(xs, dtype=np.float64).ravel()
    if arr.size == 0:
        raise InsufficientData("quantile of an empty sample")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    return float(np.quantile(arr, alpha))


def _iqr_bounds(values: np.ndarray) -> tuple[float, float]:
    q1 = quantile(values, 0.25)
    q3 = quantile(values, 0.75)
    iqr = q3 - q1
    return q1 - 1.5 * iqr, q3 + 1.5 * iqr


def iqr_filter(pairs: Sequence[PerplexityPair]) -> np.ndarray:
    """Keep-mask over one class's pairs.

    A pair is dropped when either its ppl or its ppl_shuf falls outside
    [Q1 - 1.5 IQR, Q3 + 1.5 IQR] of that variable.
    """
    if len(pairs) < MIN_IQR_SIZE:
        raise InsufficientData(
            f"need at least {MIN_IQR_SIZE} pairs for outlier filtering, got {len(pairs)}"
        )
    ppl = np.array([p.ppl for p in pairs])
    shuf = np.array([p.ppl_shuf for p in pairs])
    lo1, hi1 = _iqr_bounds(ppl)
    lo2, hi2 = _iqr_bounds(shuf)
    return (ppl >= lo1) & (ppl <= hi1) & (shuf >= lo2) & (shuf <= hi2)
