"""Scalar features combining a text's perplexity with its shuffled version's.

Five views of the same pair, kept separate on purpose (each captures a
different contrast: total magnitude, absolute shift, multiplicative shift,
its log, and the shift as a percentage).  They are never collapsed into a
single statistic.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class FeatureType(str, enum.Enum):
    SUM = "sum"
    DIFF = "diff"
    RATIO = "ratio"
    LOGRATIO = "logratio"
    CHANGE = "change"


FEATURE_ORDER: tuple[FeatureType, ...] = (
    FeatureType.SUM,
    FeatureType.DIFF,
    FeatureType.RATIO,
    FeatureType.LOGRATIO,
    FeatureType.CHANGE,
)


@dataclass(frozen=True)
class PerplexityPair:
    """Perplexity of the original text and of its shuffled counterpart."""

    ppl: float
    ppl_shuf: float

    def __post_init__(self):
        for name, v in (("ppl", self.ppl), ("ppl_shuf", self.ppl_shuf)):
            if not math.isfinite(v) or v < 1.0:
                raise ValueError(f"{name} must be finite and >= 1, got {v!r}")


FeatureVector = dict[FeatureType, float]


def compute_feature(pair: PerplexityPair, feature: FeatureType) -> float:
    p, q = pair.ppl, pair.ppl_shuf
    if feature is FeatureType.SUM:
        return q + p
    if feature is FeatureType.DIFF:
        return q - p
    if feature is FeatureType.RATIO:
        return q / p
    if feature is FeatureType.LOGRATIO:
        return math.log(q / p)
    if feature is FeatureType.CHANGE:
        return 100.0 * (q - p) / p
    raise ValueError(f"unknown feature type {feature!r}")


def compute_all(pair: PerplexityPair) -> FeatureVector:
    return {f: compute_feature(pair, f) for f in FEATURE_ORDER}
