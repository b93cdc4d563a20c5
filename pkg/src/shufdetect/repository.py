"""Build, select, serialize and load the per-domain fitted-density repository.

For every feature type and candidate family, both classes' feature samples
run through the parametric-bootstrap KS test; families surviving the
significance gate *for both classes* are candidates, and the one with the
largest min(boot_p) wins (ties: fewer free parameters, then family name).
A feature type enters the usable set only if some family survives.  Each kept
feature also gets an implausibility threshold: the alpha-quantile of its own
fitting observations' density values, minimized over the two classes.

The repository is a single versioned JSON document so a build is auditable
and a load/save round trip is bit-exact.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CorruptFile, EmptyFeatureSet, InsufficientData, OptimizationFailed, SchemaMismatch, SupportViolation
from .features import FEATURE_ORDER, FeatureType, PerplexityPair, compute_feature
from .scoring import ScorerMeta
from .statfit import Family, FittedDist, bootstrap_ks, fit_mle, iqr_filter, ks_statistic, pdf, quantile
from .statfit.families import FAMILY_INFO

SCHEMA_VERSION = 1
MGT = "MGT"
HGT = "HGT"

ALL_FAMILIES: tuple[Family, ...] = tuple(Family)

# A family whose observed KS distance satisfies D*sqrt(n) above this value
# cannot reach a bootstrap p-value anywhere near the significance gate
# (the refit null keeps D*sqrt(n) well below 1.5), so the bootstrap is
# skipped for it.  Deterministic, and far outside the selection boundary.
FAST_REJECT_Z = 2.5


@dataclass(frozen=True)
class FitOptions:
    families: tuple[Family, ...] = ALL_FAMILIES
    bootstrap_b: int = 200
    significance: float = 0.05
    alpha_impl: float = 0.01
    outlier_removal: bool = True
    seed: int = 0
    min_pairs: int = 50
    fast_reject_z: float | None = FAST_REJECT_Z


@dataclass(frozen=True)
class RepoEntry:
    feature: FeatureType
    label: str                  # MGT or HGT
    dist: FittedDist
    boot_p: float
    n_fit: int


@dataclass(frozen=True)
class Repository:
    domain_id: str
    scorer_meta: ScorerMeta | None
    significance: float
    alpha_impl: float
    feature_set: tuple[FeatureType, ...]
    entries: tuple[RepoEntry, ...]
    tau: dict[FeatureType, float]
    tau_source: dict[FeatureType, str]
    provenance: dict = field(default_factory=dict)

    def entry(self, feature: FeatureType, label: str) -> RepoEntry:
        for e in self.entries:
            if e.feature == feature and e.label == label:
                return e
        raise KeyError(f"no entry for ({feature}, {label})")


def _feature_samples(pairs: Sequence[PerplexityPair]) -> dict[FeatureType, np.ndarray]:
    return {
        f: np.array([compute_feature(p, f) for p in pairs], dtype=np.float64)
        for f in FEATURE_ORDER
    }


def _cell_seed(base: int, feature: FeatureType, family: Family, label: str) -> int:
    ss = np.random.SeedSequence(
        (base, FEATURE_ORDER.index(feature), list(Family).index(family), label == MGT)
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _gof_cell(family: Family, xs: np.ndarray, options: FitOptions,
              seed: int) -> tuple[FittedDist, float] | None:
    """(fitted dist, boot_p) or None when the family cannot model the sample."""
    try:
        fitted = fit_mle(family, xs)
    except (OptimizationFailed, SupportViolation, InsufficientData):
        return None
    if options.fast_reject_z is not None:
        d_obs = ks_statistic(xs, fitted)
        if d_obs * math.sqrt(xs.size) > options.fast_reject_z:
            return fitted, 0.0
    try:
        gof = bootstrap_ks(family, xs, B=options.bootstrap_b, seed=seed)
    except (OptimizationFailed, SupportViolation, InsufficientData):
        return None
    return fitted, gof.boot_p


def fit_repository(hgt_pairs: Sequence[PerplexityPair],
                   mgt_pairs: Sequence[PerplexityPair],
                   options: FitOptions = FitOptions(),
                   domain_id: str = "default",
                   scorer_meta: ScorerMeta | None = None) -> Repository:
    if len(hgt_pairs) < options.min_pairs or len(mgt_pairs) < options.min_pairs:
        raise InsufficientData(
            f"need at least {options.min_pairs} pairs per class, got "
            f"HGT={len(hgt_pairs)}, MGT={len(mgt_pairs)}"
        )

    classes: dict[str, list[PerplexityPair]] = {HGT: list(hgt_pairs), MGT: list(mgt_pairs)}
    outlier_fraction: dict[str, float] = {}
    if options.outlier_removal:
        for label, pairs in classes.items():
            mask = iqr_filter(pairs)
            kept = [p for p, keep in zip(pairs, mask) if keep]
            outlier_fraction[label] = 1.0 - len(kept) / len(pairs)
            classes[label] = kept
    else:
        outlier_fraction = {HGT: 0.0, MGT: 0.0}

    samples = {label: _feature_samples(pairs) for label, pairs in classes.items()}

    entries: list[RepoEntry] = []
    feature_set: list[FeatureType] = []
    tau: dict[FeatureType, float] = {}
    tau_source: dict[FeatureType, str] = {}

    for feature in FEATURE_ORDER:
        candidates: list[tuple[float, int, str, Family, dict[str, tuple[FittedDist, float]]]] = []
        for family in options.families:
            cells: dict[str, tuple[FittedDist, float]] = {}
            for label in (MGT, HGT):
                cell = _gof_cell(family, samples[label][feature], options,
                                 _cell_seed(options.seed, feature, family, label))
                if cell is None or cell[1] <= options.significance:
                    cells = {}
                    break
                cells[label] = cell
            if cells:
                min_p = min(cells[MGT][1], cells[HGT][1])
                candidates.append(
                    (-min_p, FAMILY_INFO[family].n_free, family.value, family, cells)
                )
        if not candidates:
            continue
        candidates.sort(key=lambda c: (c[0], c[1], c[2]))
        _, _, _, family, cells = candidates[0]
        feature_set.append(feature)
        taus: dict[str, float] = {}
        for label in (MGT, HGT):
            fitted, boot_p = cells[label]
            n_fit = samples[label][feature].size
            entries.append(RepoEntry(feature=feature, label=label, dist=fitted,
                                     boot_p=boot_p, n_fit=n_fit))
            density_at_fit = pdf(fitted, samples[label][feature])
            taus[label] = quantile(density_at_fit, options.alpha_impl)
        source = MGT if taus[MGT] <= taus[HGT] else HGT
        tau[feature] = taus[source]
        tau_source[feature] = source

    if not feature_set:
        raise EmptyFeatureSet(
            "no feature type had a family passing the goodness-of-fit gate"
        )

    provenance = {
        "seed": options.seed,
        "bootstrap_b": options.bootstrap_b,
        "outlier_removal": options.outlier_removal,
        "outlier_fraction": outlier_fraction,
        "families": [f.value for f in options.families],
        "fast_reject_z": options.fast_reject_z,
        "n_pairs": {label: len(pairs) for label, pairs in classes.items()},
    }
    return Repository(
        domain_id=domain_id,
        scorer_meta=scorer_meta,
        significance=options.significance,
        alpha_impl=options.alpha_impl,
        feature_set=tuple(feature_set),
        entries=tuple(entries),
        tau=tau,
        tau_source=tau_source,
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _repo_to_json(repo: Repository) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "domain_id": repo.domain_id,
        "scorer": None if repo.scorer_meta is None else {
            "model_id": repo.scorer_meta.model_id,
            "context_window": repo.scorer_meta.context_window,
            "stride": repo.scorer_meta.stride,
        },
        "significance": repo.significance,
        "alpha_impl": repo.alpha_impl,
        "feature_set": [f.value for f in repo.feature_set],
        "entries": [
            {
                "feature": e.feature.value,
                "label": e.label,
                "family": e.dist.family.value,
                "params": list(e.dist.params),
                "nll_at_fit": e.dist.nll_at_fit,
                "sample_size": e.dist.sample_size,
                "boot_p": e.boot_p,
                "n_fit": e.n_fit,
            }
            for e in repo.entries
        ],
        "tau": {f.value: v for f, v in repo.tau.items()},
        "tau_source": {f.value: v for f, v in repo.tau_source.items()},
        "provenance": repo.provenance,
    }


def save(repo: Repository, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(_repo_to_json(repo), fh, indent=2, allow_nan=True)
        fh.write("\n")
    os.replace(tmp, path)


def load(path: str) -> Repository:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptFile(f"{path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"{path}: expected schema_version {SCHEMA_VERSION}, "
            f"got {doc.get('schema_version')!r}"
        )
    required = {"domain_id", "significance", "alpha_impl", "feature_set",
                "entries", "tau", "tau_source"}
    missing = required - doc.keys()
    if missing:
        raise SchemaMismatch(f"{path}: missing fields {sorted(missing)}")
    try:
        scorer = doc.get("scorer")
        meta = None if scorer is None else ScorerMeta(
            model_id=scorer["model_id"],
            context_window=int(scorer["context_window"]),
            stride=int(scorer["stride"]),
        )
        entries = tuple(
            RepoEntry(
                feature=FeatureType(e["feature"]),
                label=str(e["label"]),
                dist=FittedDist(
                    family=Family(e["family"]),
                    params=tuple(float(v) for v in e["params"]),
                    nll_at_fit=float(e["nll_at_fit"]),
                    sample_size=int(e["sample_size"]),
                ),
                boot_p=float(e["boot_p"]),
                n_fit=int(e["n_fit"]),
            )
            for e in doc["entries"]
        )
        repo = Repository(
            domain_id=str(doc["domain_id"]),
            scorer_meta=meta,
            significance=float(doc["significance"]),
            alpha_impl=float(doc["alpha_impl"]),
            feature_set=tuple(FeatureType(f) for f in doc["feature_set"]),
            entries=entries,
            tau={FeatureType(k): float(v) for k, v in doc["tau"].items()},
            tau_source={FeatureType(k): str(v) for k, v in doc["tau_source"].items()},
            provenance=doc.get("provenance", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaMismatch(f"{path}: malformed field ({exc})") from exc
    for f in repo.feature_set:
        if f not in repo.tau:
            raise SchemaMismatch(f"{path}: tau missing for feature {f.value}")
    return repo
