"""Per-feature density voting over a fitted repository.

For each usable feature type: evaluate both class densities at the observed
value, drop the feature when both densities sit below the implausibility
threshold (or, with the check disabled, when both are exactly zero — the
feature then abstains rather than erroring the query), convert the surviving
densities to an MGT probability, and vote.  A query where every feature
drops is rejected outright.  The default decision is majority consensus with
ties going to MGT, mirroring the >= in the vote rule.

The uncertainty threshold variants are evaluated literally.  Note that the
"d" variant makes every vote MGT by construction (substituting it into the
vote rule collapses to p_m >= p_m - eps); the test suite asserts this
consequence rather than hiding it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DivisionDomain, UnknownFeature, ZeroDensitySum
from .features import FeatureType, PerplexityPair, compute_feature
from .repository import HGT, MGT, Repository
from .scoring import NllCache, score_pair
from .shuffler import ShuffleSeed
from .statfit import pdf

REJECT = "REJECT"

UPSILON_VARIANTS = ("none", "d", "r", "lr")
EPSILON_DEFAULTS = {"none": 0.0, "d": 0.001, "r": 0.025, "lr": 0.05}


@dataclass(frozen=True)
class DetectorConfig:
    use_implausibility: bool = True
    upsilon_variant: str = "none"
    epsilon: float | None = None          # None selects the variant default
    decision_logic: str = "majority_consensus"  # or "mean_probability"
    tie_break: str = MGT

    def __post_init__(self):
        if self.upsilon_variant not in UPSILON_VARIANTS:
            raise ValueError(f"upsilon_variant must be one of {UPSILON_VARIANTS}")
        if self.decision_logic not in ("majority_consensus", "mean_probability"):
            raise ValueError(f"unknown decision_logic {self.decision_logic!r}")
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.tie_break not in (MGT, HGT):
            raise ValueError("tie_break must be MGT or HGT")

    @property
    def effective_epsilon(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return EPSILON_DEFAULTS[self.upsilon_variant]


@dataclass(frozen=True)
class FeatureRecord:
    feature: FeatureType
    z: float
    pdf_mgt: float
    pdf_hgt: float
    p_mgt: float | None
    vote: str | None
    rejected: bool


@dataclass(frozen=True)
class Decision:
    label: str                       # MGT, HGT or REJECT
    mgt_probability: float | None
    records: tuple[FeatureRecord, ...]
    votes: dict[str, int] = field(default_factory=dict)

    @property
    def rejected_features(self) -> tuple[FeatureType, ...]:
        return tuple(r.feature for r in self.records if r.rejected)


def eval_densities(z: float, feature: FeatureType, repo: Repository) -> tuple[float, float]:
    """Class densities of the stored fits at the observed feature value."""
    if feature not in repo.feature_set:
        raise UnknownFeature(f"{feature.value} is not in the repository's feature set")
    pdf_m = float(pdf(repo.entry(feature, MGT).dist, z))
    pdf_h = float(pdf(repo.entry(feature, HGT).dist, z))
    return pdf_m, pdf_h


def implausible(pdf_mgt: float, pdf_hgt: float, tau: float) -> bool:
    """True when neither class makes the observation plausible (strict)."""
    if tau <= 0:
        raise ValueError("tau must be > 0")
    return max(pdf_mgt, pdf_hgt) < tau


def ensemble_prob(pdf_mgt: float, pdf_hgt: float) -> float:
    total = pdf_mgt + pdf_hgt
    if total <= 0.0:
        raise ZeroDensitySum("both class densities are zero")
    return pdf_mgt / total


def upsilon(variant: str, p_hgt: float, p_mgt: float, epsilon: float) -> float:
    """Literal evaluation of the uncertainty-threshold variants."""
    if variant == "none":
        return 0.0
    if variant == "d":
        return p_hgt - p_mgt + epsilon
    if variant in ("r", "lr"):
        if p_mgt == 0.0:
            raise DivisionDomain(f"variant {variant} requires p_mgt > 0")
        if variant == "r":
            return p_hgt / p_mgt - 1.0 + epsilon
        if p_hgt == 0.0:
            return -math.inf  # literal limit of log(0/p_mgt)
        return math.log(p_hgt / p_mgt) + epsilon
    raise ValueError(f"unknown upsilon variant {variant!r}")


def vote(p_mgt: float, p_hgt: float, ups: float) -> str:
    """MGT wins at equality: p_mgt >= p_hgt - upsilon."""
    return MGT if p_mgt >= p_hgt - ups else HGT


def _upsilon_for_vote(cfg: DetectorConfig, p_hgt: float, p_mgt: float) -> float:
    # Continuous extension at p_mgt == 0 for the ratio variants: the limit of
    # both formulas is +inf, which makes the vote MGT.
    if cfg.upsilon_variant in ("r", "lr") and p_mgt == 0.0:
        return math.inf
    return upsilon(cfg.upsilon_variant, p_hgt, p_mgt, cfg.effective_epsilon)


def decide(records: tuple[FeatureRecord, ...] | list[FeatureRecord],
           cfg: DetectorConfig = DetectorConfig()) -> Decision:
    """Aggregate per-feature records into the final label.

    All features rejected gives REJECT; otherwise majority consensus over the
    surviving votes (ties to cfg.tie_break) or a mean-probability threshold.
    """
    records = tuple(records)
    surviving = [r for r in records if not r.rejected]
    if not surviving:
        return Decision(label=REJECT, mgt_probability=None, records=records,
                        votes={MGT: 0, HGT: 0})

    votes = {
        MGT: sum(1 for r in surviving if r.vote == MGT),
        HGT: sum(1 for r in surviving if r.vote == HGT),
    }
    mean_p = sum(r.p_mgt for r in surviving) / len(surviving)
    if cfg.decision_logic == "mean_probability":
        label = MGT if mean_p >= 0.5 else HGT
    else:
        if votes[MGT] > votes[HGT]:
            label = MGT
        elif votes[HGT] > votes[MGT]:
            label = HGT
        else:
            label = cfg.tie_break
    return Decision(label=label, mgt_probability=mean_p, records=records,
                    votes=votes)


def classify(pair: PerplexityPair, repo: Repository,
             cfg: DetectorConfig = DetectorConfig()) -> Decision:
    """Algorithm: densities -> implausibility filter -> votes -> label."""
    records: list[FeatureRecord] = []
    for feature in repo.feature_set:
        z = compute_feature(pair, feature)
        pdf_m, pdf_h = eval_densities(z, feature, repo)
        if cfg.use_implausibility:
            dropped = implausible(pdf_m, pdf_h, repo.tau[feature])
        else:
            dropped = (pdf_m + pdf_h) == 0.0
        if dropped:
            records.append(FeatureRecord(feature, z, pdf_m, pdf_h, None, None, True))
            continue
        p_m = ensemble_prob(pdf_m, pdf_h)
        p_h = 1.0 - p_m
        v = vote(p_m, p_h, _upsilon_for_vote(cfg, p_h, p_m))
        records.append(FeatureRecord(feature, z, pdf_m, pdf_h, p_m, v, False))
    return decide(records, cfg)


def detect_text(text: str, repo: Repository, scorer,
                cfg: DetectorConfig = DetectorConfig(),
                seed: ShuffleSeed | int = 0,
                cache: NllCache | None = None) -> Decision:
    """shuffle -> score both texts -> classify; two scorer calls per query."""
    pair = score_pair(text, seed, scorer, cache)
    return classify(pair, repo, cfg)
