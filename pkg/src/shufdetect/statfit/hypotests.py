"""Two-sample significance tests: Welch's t and Mann-Whitney U.

Welch reports the raw mean difference as the effect with a 95% CI and the
Welch-Satterthwaite two-sided p.  Mann-Whitney reports the rank-biserial
correlation 2*U_x/(n*m) - 1; the p-value is exact (full enumeration over
assignments) when n + m <= 20 and a tie-corrected normal approximation
otherwise, while the CI always comes from the normal approximation on the
rank-biserial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy import special

from ..errors import DegenerateVariance, InsufficientData

_EXACT_LIMIT = 20


@dataclass(frozen=True)
class TestReport:
    effect: float
    ci_low: float
    ci_high: float
    p_value: float


def welch_t(x, y) -> TestReport:
    xa = np.asarray(x, dtype=np.float64).ravel()
    ya = np.asarray(y, dtype=np.float64).ravel()
    n, m = xa.size, ya.size
    if n < 2 or m < 2:
        raise InsufficientData("welch_t needs at least 2 observations per sample")
    vx = float(np.var(xa, ddof=1))
    vy = float(np.var(ya, ddof=1))
    if vx == 0.0 and vy == 0.0:
        raise DegenerateVariance("both samples have zero variance")
    effect = float(np.mean(xa) - np.mean(ya))
    se2 = vx / n + vy / m
    se = math.sqrt(se2)
    df = se2 * se2 / ((vx / n) ** 2 / (n - 1) + (vy / m) ** 2 / (m - 1))
    t = effect / se
    p = 2.0 * float(special.stdtr(df, -abs(t)))
    t975 = float(special.stdtrit(df, 0.975))
    return TestReport(effect=effect, ci_low=effect - t975 * se,
                      ci_high=effect + t975 * se, p_value=min(p, 1.0))


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(values.size, dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _u_statistic(ranks: np.ndarray, idx_x, n: int) -> float:
    return float(np.sum(ranks[list(idx_x)])) - n * (n + 1) / 2.0


def mannwhitney_u(x, y) -> TestReport:
    xa = np.asarray(x, dtype=np.float64).ravel()
    ya = np.asarray(y, dtype=np.float64).ravel()
    n, m = xa.size, ya.size
    if n < 1 or m < 1:
        raise InsufficientData("mannwhitney_u needs at least 1 observation per sample")
    pooled = np.concatenate([xa, ya])
    total = n + m
    ranks = _midranks(pooled)
    u_x = _u_statistic(ranks, range(n), n)
    effect = 2.0 * u_x / (n * m) - 1.0

    # tie-corrected variance of U under the null
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(counts.astype(np.float64) ** 3 - counts))
    var_u = n * m / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)))

    mu = n * m / 2.0
    if total <= _EXACT_LIMIT:
        dev = abs(u_x - mu)
        hits = 0
        count = 0
        for idx in combinations(range(total), n):
            u = _u_statistic(ranks, idx, n)
            if abs(u - mu) >= dev - 1e-12:
                hits += 1
            count += 1
        p = hits / count
    else:
        if var_u <= 0:
            p = 1.0
        else:
            z = (u_x - mu) / math.sqrt(var_u)
            p = 2.0 * float(special.ndtr(-abs(z)))
    se_rb = 2.0 * math.sqrt(max(var_u, 0.0)) / (n * m)
    return TestReport(effect=effect,
                      ci_low=max(effect - 1.959963984540054 * se_rb, -1.0),
                      ci_high=min(effect + 1.959963984540054 * se_rb, 1.0),
                      p_value=min(p, 1.0))
