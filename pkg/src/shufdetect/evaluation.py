"""Dataset loading, FPR/FNR metrics, grid search, corpus statistics.

Rejected queries are excluded from the FPR/FNR denominators and reported as
separate reject rates; every report carries the raw counts so the convention
is visible.  The grid search enumerates outlier-filtering x implausibility x
uncertainty-threshold combinations against a fixed set of scored pairs, so
sweeping configurations costs no additional scorer calls.
"""

from __future__ import annotations

import csv
import gzip
import json
import math
import re
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import AllRejected, EmptyGroup, EmptyInput, LengthMismatch, ParseError
from .features import FEATURE_ORDER, FeatureType, PerplexityPair
from .inference import REJECT, Decision, DetectorConfig, classify
from .repository import HGT, MGT, FitOptions, Repository, fit_repository
from .segmentation import segment
from .statfit import TestReport, mannwhitney_u, welch_t

_LABEL_ALIASES = {"mgt": MGT, "machine": MGT, "hgt": HGT, "human": HGT}


@dataclass
class LabeledRecord:
    id: str
    text: str
    label: str                      # MGT or HGT
    domain: str = ""
    generator: str | None = None
    attack: str | None = None
    language: str | None = None
    metadata: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RateReport:
    fpr: float
    fnr: float
    reject_rate_hgt: float
    reject_rate_mgt: float
    tp: int
    fp: int
    tn: int
    fn: int
    rejects: int


def rates(decisions: Sequence[Decision], labels: Sequence[str]) -> RateReport:
    """FPR/FNR over non-rejected decisions, reject rates per class."""
    if len(decisions) != len(labels):
        raise LengthMismatch(f"{len(decisions)} decisions vs {len(labels)} labels")
    tp = fp = tn = fn = 0
    rej_h = rej_m = 0
    n_h = n_m = 0
    for dec, label in zip(decisions, labels):
        if label == HGT:
            n_h += 1
            if dec.label == REJECT:
                rej_h += 1
            elif dec.label == MGT:
                fp += 1
            else:
                tn += 1
        elif label == MGT:
            n_m += 1
            if dec.label == REJECT:
                rej_m += 1
            elif dec.label == HGT:
                fn += 1
            else:
                tp += 1
        else:
            raise ValueError(f"unknown true label {label!r}")
    if n_h > 0 and fp + tn == 0:
        raise AllRejected("every HGT instance was rejected; FPR undefined")
    if n_m > 0 and fn + tp == 0:
        raise AllRejected("every MGT instance was rejected; FNR undefined")
    return RateReport(
        fpr=fp / (fp + tn) if n_h else math.nan,
        fnr=fn / (fn + tp) if n_m else math.nan,
        reject_rate_hgt=rej_h / n_h if n_h else 0.0,
        reject_rate_mgt=rej_m / n_m if n_m else 0.0,
        tp=tp, fp=fp, tn=tn, fn=fn, rejects=rej_h + rej_m,
    )


# ---------------------------------------------------------------------------
# Grid search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridConfig:
    outlier_removal: bool
    use_implausibility: bool
    upsilon_variant: str

    def describe(self) -> str:
        return (f"outlier={'on' if self.outlier_removal else 'off'} "
                f"impl={'on' if self.use_implausibility else 'off'} "
                f"upsilon={self.upsilon_variant}")


GRID_CONFIGS: tuple[GridConfig, ...] = tuple(
    GridConfig(outlier, impl, ups)
    for outlier in (False, True)
    for impl in (False, True)
    for ups in ("none", "d", "r", "lr")
)


@dataclass(frozen=True)
class GridOutcome:
    config: GridConfig
    group_wins: int
    mean_rate: float
    per_group: dict[str, float]


@dataclass(frozen=True)
class GridSearchResult:
    mode: str                      # "low_fpr" or "low_fnr"
    winner: GridConfig
    ranking: tuple[GridOutcome, ...]


def select_best(rate_table: dict[GridConfig, dict[str, float]], mode: str) -> GridSearchResult:
    """Majority of per-group wins; ties by the lowest mean target rate."""
    groups = sorted({g for rates_ in rate_table.values() for g in rates_})
    if not groups:
        raise EmptyGroup("no groups to select over")
    wins = {cfg: 0 for cfg in rate_table}
    for g in groups:
        best_cfg = min(
            rate_table,
            key=lambda cfg: (rate_table[cfg].get(g, math.inf), GRID_CONFIGS.index(cfg)),
        )
        wins[best_cfg] += 1
    means = {
        cfg: float(np.mean([v for v in rate_table[cfg].values() if math.isfinite(v)]))
        if any(math.isfinite(v) for v in rate_table[cfg].values()) else math.inf
        for cfg in rate_table
    }
    ranked = sorted(
        rate_table,
        key=lambda cfg: (-wins[cfg], means[cfg], GRID_CONFIGS.index(cfg)),
    )
    outcomes = tuple(
        GridOutcome(config=cfg, group_wins=wins[cfg], mean_rate=means[cfg],
                    per_group=dict(rate_table[cfg]))
        for cfg in ranked
    )
    return GridSearchResult(mode=mode, winner=ranked[0], ranking=outcomes)


def grid_search(fit_hgt: Sequence[PerplexityPair],
                fit_mgt: Sequence[PerplexityPair],
                test_records: Sequence[LabeledRecord],
                test_pairs: Sequence[PerplexityPair],
                base_options: FitOptions = FitOptions(),
                group_by: str = "generator") -> dict[str, GridSearchResult]:
    """Evaluate all configurations and pick per-mode winners.

    ``test_pairs`` must align with ``test_records`` (scored upstream, e.g.
    from the nll cache); decision-logic sweeps then cost no scorer calls.
    """
    if len(test_records) != len(test_pairs):
        raise LengthMismatch(
            f"{len(test_records)} records vs {len(test_pairs)} pairs"
        )
    if not test_records:
        raise EmptyGroup("empty test set")

    groups: dict[str, list[int]] = {}
    for i, rec in enumerate(test_records):
        key = getattr(rec, group_by, None) or "(all)"
        groups.setdefault(str(key), []).append(i)

    repos: dict[bool, Repository] = {}
    for outlier in (False, True):
        repos[outlier] = fit_repository(
            fit_hgt, fit_mgt, replace(base_options, outlier_removal=outlier)
        )

    fpr_table: dict[GridConfig, dict[str, float]] = {}
    fnr_table: dict[GridConfig, dict[str, float]] = {}
    for cfg in GRID_CONFIGS:
        det = DetectorConfig(use_implausibility=cfg.use_implausibility,
                             upsilon_variant=cfg.upsilon_variant)
        repo = repos[cfg.outlier_removal]
        decisions = [classify(pair, repo, det) for pair in test_pairs]
        fpr_table[cfg] = {}
        fnr_table[cfg] = {}
        for gname, idxs in groups.items():
            try:
                rep = rates([decisions[i] for i in idxs],
                            [test_records[i].label for i in idxs])
                fpr_table[cfg][gname] = rep.fpr
                fnr_table[cfg][gname] = rep.fnr
            except AllRejected:
                fpr_table[cfg][gname] = math.inf
                fnr_table[cfg][gname] = math.inf

    return {
        "low_fpr": select_best(fpr_table, "low_fpr"),
        "low_fnr": select_best(fnr_table, "low_fnr"),
    }


# ---------------------------------------------------------------------------
# Corpus statistics
# ---------------------------------------------------------------------------

_VOWEL_GROUPS = re.compile(r"[aeiouy]+")


def count_syllables(word: str) -> int:
    """Vowel-group counting with the trailing silent 'e' dropped.

    Maximal aeiouy runs count one syllable each; a final lone 'e' is silent
    unless it forms the only vowel group; every word counts at least one.
    """
    letters = "".join(ch for ch in word.lower() if ch.isalpha())
    groups = _VOWEL_GROUPS.findall(letters)
    n = len(groups)
    if (n > 1 and letters.endswith("e")
            and (len(letters) < 2 or letters[-2] not in "aeiouy")):
        n -= 1
    return max(n, 1)


def flesch_reading_ease(text: str) -> float:
    """206.835 - 1.015*(words/sentences) - 84.6*(syllables/words)."""
    doc = segment(text)  # raises EmptyInput on blank text
    words: list[str] = []
    n_sentences = 0
    for par in doc.paragraphs:
        for sent in par.sentences:
            n_sentences += 1
            words.extend(sent.words)
    if not words:
        raise EmptyInput("text has no words")
    n_syllables = sum(count_syllables(w) for w in words)
    return (206.835
            - 1.015 * (len(words) / n_sentences)
            - 84.6 * (n_syllables / len(words)))


def compression_ratio(text: str) -> float:
    """UTF-8 byte length over gzip(level 6) byte length; deterministic."""
    if not text:
        raise EmptyInput("cannot compress empty text")
    raw = text.encode("utf-8")
    packed = gzip.compress(raw, compresslevel=6, mtime=0)
    return len(raw) / len(packed)


# ---------------------------------------------------------------------------
# Dataset loading
# ---------------------------------------------------------------------------

_KNOWN_COLUMNS = {"id", "text", "label", "domain", "generator", "attack", "language"}


def _make_record(row: dict, line: int) -> LabeledRecord:
    if "text" not in row or row["text"] in (None, ""):
        raise ParseError("missing text", line)
    if "label" not in row or row["label"] in (None, ""):
        raise ParseError("missing label", line)
    label_raw = str(row["label"]).strip().lower()
    if label_raw not in _LABEL_ALIASES:
        raise ParseError(f"unknown label {row['label']!r}", line)
    meta = {k: v for k, v in row.items() if k not in _KNOWN_COLUMNS}
    return LabeledRecord(
        id=str(row.get("id") or f"row-{line}"),
        text=str(row["text"]),
        label=_LABEL_ALIASES[label_raw],
        domain=str(row.get("domain") or ""),
        generator=row.get("generator") or None,
        attack=row.get("attack") or None,
        language=row.get("language") or None,
        metadata=meta,
    )


def load_dataset(path: str, fmt: str | None = None) -> list[LabeledRecord]:
    """Read labeled records from csv (header row) or jsonl."""
    if fmt is None:
        fmt = "csv" if path.endswith(".csv") else "jsonl"
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"format must be csv or jsonl, got {fmt!r}")
    records: list[LabeledRecord] = []
    with open(path, encoding="utf-8") as fh:
        if fmt == "jsonl":
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON ({exc.msg})", lineno) from exc
                if not isinstance(row, dict):
                    raise ParseError("record must be a JSON object", lineno)
                records.append(_make_record(row, lineno))
        else:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise ParseError("empty csv file", 1)
            if "label" not in reader.fieldnames:
                raise ParseError("missing label column", 1)
            if "text" not in reader.fieldnames:
                raise ParseError("missing text column", 1)
            for lineno, row in enumerate(reader, start=2):
                records.append(_make_record(row, lineno))
    return records


# ---------------------------------------------------------------------------
# Feature significance
# ---------------------------------------------------------------------------

def significance_report(hgt_features: dict[FeatureType, np.ndarray],
                        mgt_features: dict[FeatureType, np.ndarray],
                        ) -> dict[FeatureType, dict[str, TestReport]]:
    """Welch and Mann-Whitney per feature; effects read MGT minus HGT."""
    out: dict[FeatureType, dict[str, TestReport]] = {}
    for feature in FEATURE_ORDER:
        if feature not in hgt_features or feature not in mgt_features:
            continue
        x = np.asarray(mgt_features[feature], dtype=np.float64)
        y = np.asarray(hgt_features[feature], dtype=np.float64)
        out[feature] = {
            "welch": welch_t(x, y),
            "mannwhitney": mannwhitney_u(x, y),
        }
    return out
