"""Command-line interface: shuffle, score, fit, detect, eval, gridsearch, stats.

Machine-readable output goes to stdout, diagnostics to stderr.  Exit codes:
0 success, 1 usage error, 2 data/protocol error.  Every subcommand runs
end-to-end with the built-in mock scorers (e.g. ``--scorer
mock:constant-nll=0.693``), so no model runtime is needed for tests or demos.
A JSON config file (``--config``) may preset any long flag, with explicit
flags winning.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict

import numpy as np

from . import evaluation
from .errors import DetectorError, ParseError, UsageError
from .features import PerplexityPair, compute_all
from .inference import REJECT, DetectorConfig, classify, detect_text
from .repository import ALL_FAMILIES, FitOptions, fit_repository, load, save
from .scoring import NllCache, make_scorer, score_document, score_pair
from .segmentation import segment
from .shuffler import shuffle_text
from .statfit import Family


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_text(args) -> str:
    if getattr(args, "input", None):
        with open(args.input, encoding="utf-8") as fh:
            return fh.read()
    return sys.stdin.read()


def _record_seed(base: int, index: int) -> int:
    return int(np.random.SeedSequence((base, index)).generate_state(1, dtype=np.uint64)[0])


def load_pairs(path: str) -> list[PerplexityPair]:
    """Read (ppl, ppl_shuf) pairs from a jsonl or csv file."""
    pairs: list[PerplexityPair] = []
    if path.endswith(".csv"):
        import csv
        with open(path, encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"ppl", "ppl_shuf"} <= set(reader.fieldnames):
                raise ParseError("pairs csv needs ppl and ppl_shuf columns", 1)
            for lineno, row in enumerate(reader, start=2):
                try:
                    pairs.append(PerplexityPair(float(row["ppl"]), float(row["ppl_shuf"])))
                except (TypeError, ValueError) as exc:
                    raise ParseError(str(exc), lineno) from exc
    else:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    row = json.loads(line)
                    pairs.append(PerplexityPair(float(row["ppl"]), float(row["ppl_shuf"])))
                except (KeyError, TypeError, ValueError) as exc:
                    raise ParseError(f"bad pair record ({exc})", lineno) from exc
    return pairs


def _parse_families(spec: str | None) -> tuple[Family, ...]:
    if not spec:
        return ALL_FAMILIES
    out = []
    for name in spec.split(","):
        name = name.strip().lower()
        if not name:
            continue
        try:
            out.append(Family(name))
        except ValueError as exc:
            raise UsageError(
                f"unknown family {name!r}; choose from "
                + ",".join(f.value for f in Family)
            ) from exc
    if not out:
        raise UsageError("empty family list")
    return tuple(out)


def _fit_options(args) -> FitOptions:
    return FitOptions(
        families=_parse_families(args.families),
        bootstrap_b=args.bootstrap_b,
        significance=args.significance,
        alpha_impl=args.alpha,
        outlier_removal=not args.no_outlier_removal,
        seed=args.seed,
        min_pairs=args.min_pairs,
    )


def _detector_config(args) -> DetectorConfig:
    return DetectorConfig(
        use_implausibility=not args.no_implausibility,
        upsilon_variant=args.upsilon,
        epsilon=args.epsilon,
        decision_logic=args.logic,
    )


def _decision_json(rec_id: str, decision) -> dict:
    return {
        "id": rec_id,
        "label": decision.label,
        "mgt_probability": decision.mgt_probability,
        "rejected_features": [f.value for f in decision.rejected_features],
        "votes": decision.votes,
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_shuffle(args) -> int:
    text = _read_text(args)
    sys.stdout.write(shuffle_text(text, args.seed) + "\n")
    return 0


def cmd_score(args) -> int:
    text = _read_text(args)
    scorer = make_scorer(args.scorer)
    cache = NllCache(args.cache) if args.cache else None
    try:
        if args.pair:
            pair = score_pair(text, args.seed, scorer, cache)
            print(json.dumps({"ppl": pair.ppl, "ppl_shuf": pair.ppl_shuf,
                              "features": {k.value: v for k, v in compute_all(pair).items()}}))
        else:
            print(json.dumps({"ppl": score_document(text, scorer, cache)}))
    finally:
        scorer.close()
    return 0


def cmd_fit(args) -> int:
    hgt = load_pairs(args.hgt)
    mgt = load_pairs(args.mgt)
    repo = fit_repository(hgt, mgt, _fit_options(args), domain_id=args.domain)
    save(repo, args.out)
    summary = {
        "out": args.out,
        "domain_id": repo.domain_id,
        "feature_set": [f.value for f in repo.feature_set],
        "families": {
            f"{e.feature.value}/{e.label}": e.dist.family.value for e in repo.entries
        },
        "tau": {f.value: repo.tau[f] for f in repo.feature_set},
    }
    print(json.dumps(summary, indent=2))
    return 0


def _iter_detect_inputs(stream):
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("{"):
            try:
                row = json.loads(line)
                yield str(row.get("id", lineno)), str(row["text"])
                continue
            except (json.JSONDecodeError, KeyError):
                pass
        yield str(lineno), line


def cmd_detect(args) -> int:
    repo = load(args.repo)
    cfg = _detector_config(args)
    cache = NllCache(args.cache) if args.cache else None
    inputs = list(_iter_detect_inputs(sys.stdin))

    def run_chunk(chunk):
        scorer = make_scorer(args.scorer)
        out = []
        try:
            for idx, rec_id, text in chunk:
                decision = detect_text(text, repo, scorer, cfg,
                                       seed=_record_seed(args.seed, idx), cache=cache)
                out.append((idx, rec_id, decision))
        finally:
            scorer.close()
        return out

    jobs = max(args.jobs, 1)
    indexed = [(i, rid, text) for i, (rid, text) in enumerate(inputs)]
    if jobs == 1:
        results = run_chunk(indexed)
    else:
        chunks = [indexed[i::jobs] for i in range(jobs)]
        results = []
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(run_chunk, [c for c in chunks if c]):
                results.extend(part)
    results.sort(key=lambda r: r[0])

    for _, rec_id, decision in results:
        if args.format == "jsonl":
            print(json.dumps(_decision_json(rec_id, decision)))
        else:
            prob = ("-" if decision.mgt_probability is None
                    else f"{decision.mgt_probability:.4f}")
            print(f"{rec_id}\t{decision.label}\tp_mgt={prob}")
    return 0


def _score_dataset(records, args, cache):
    if getattr(args, "pairs_from_dataset", False):
        pairs = []
        for rec in records:
            try:
                pairs.append(PerplexityPair(float(rec.metadata["ppl"]),
                                            float(rec.metadata["ppl_shuf"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(
                    f"record {rec.id}: --pairs-from-dataset needs numeric "
                    f"ppl/ppl_shuf fields ({exc})"
                ) from exc
        return pairs
    scorer = make_scorer(args.scorer)
    pairs = []
    try:
        for i, rec in enumerate(records):
            pairs.append(score_pair(rec.text, _record_seed(args.seed, i), scorer, cache))
    finally:
        scorer.close()
    return pairs


def cmd_eval(args) -> int:
    repo = load(args.repo)
    records = evaluation.load_dataset(args.dataset, args.format)
    cache = NllCache(args.cache) if args.cache else None
    pairs = _score_dataset(records, args, cache)
    cfg = _detector_config(args)
    decisions = [classify(pair, repo, cfg) for pair in pairs]
    report = evaluation.rates(decisions, [r.label for r in records])
    doc = asdict(report)
    if args.group_by:
        doc["groups"] = {}
        groups: dict[str, list[int]] = {}
        for i, rec in enumerate(records):
            key = str(getattr(rec, args.group_by, None) or "(all)")
            groups.setdefault(key, []).append(i)
        for name, idxs in sorted(groups.items()):
            rep = evaluation.rates([decisions[i] for i in idxs],
                                   [records[i].label for i in idxs])
            doc["groups"][name] = asdict(rep)
    if args.output == "table":
        print(f"{'metric':<18}{'value':>10}")
        for k in ("fpr", "fnr", "reject_rate_hgt", "reject_rate_mgt"):
            print(f"{k:<18}{doc[k]:>10.4f}")
        print(f"{'counts':<18}tp={doc['tp']} fp={doc['fp']} tn={doc['tn']} "
              f"fn={doc['fn']} rejects={doc['rejects']}")
    else:
        print(json.dumps(doc, indent=2))
    return 0


def cmd_gridsearch(args) -> int:
    fit_hgt = load_pairs(args.fit_hgt)
    fit_mgt = load_pairs(args.fit_mgt)
    records = evaluation.load_dataset(args.dataset, args.format)
    cache = NllCache(args.cache) if args.cache else None
    pairs = _score_dataset(records, args, cache)
    results = evaluation.grid_search(fit_hgt, fit_mgt, records, pairs,
                                     base_options=_fit_options(args),
                                     group_by=args.group_by)
    doc = {}
    for mode, res in results.items():
        doc[mode] = {
            "winner": res.winner.describe(),
            "ranking": [
                {
                    "config": o.config.describe(),
                    "group_wins": o.group_wins,
                    "mean_rate": None if math.isinf(o.mean_rate) else o.mean_rate,
                }
                for o in res.ranking
            ],
        }
    print(json.dumps(doc, indent=2))
    return 0


def cmd_stats(args) -> int:
    if args.dataset:
        records = evaluation.load_dataset(args.dataset, args.format)
    else:
        records = [evaluation.LabeledRecord(id="stdin", text=_read_text(args), label="HGT")]
    rows = []
    for rec in records:
        doc = segment(rec.text)
        words = sum(len(s.words) for p in doc.paragraphs for s in p.sentences)
        sentences = sum(len(p.sentences) for p in doc.paragraphs)
        rows.append({
            "id": rec.id,
            "label": rec.label,
            "paragraphs": len(doc.paragraphs),
            "sentences": sentences,
            "words": words,
            "flesch_reading_ease": evaluation.flesch_reading_ease(rec.text),
            "compression_ratio": evaluation.compression_ratio(rec.text),
        })
    if args.output == "table":
        cols = ["id", "label", "paragraphs", "sentences", "words",
                "flesch_reading_ease", "compression_ratio"]
        print("\t".join(cols))
        for row in rows:
            print("\t".join(
                f"{row[c]:.2f}" if isinstance(row[c], float) else str(row[c])
                for c in cols
            ))
    else:
        for row in rows:
            print(json.dumps(row))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_scorer_flags(p: _Parser) -> None:
    p.add_argument("--scorer", "--scorer-cmd", dest="scorer",
                   default="mock:constant-nll=0.6931471805599453",
                   help="mock:* spec or a shell command speaking the wire protocol")
    p.add_argument("--cache", default=None, help="nll cache file (jsonl, append-only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs-from-dataset", action="store_true",
                   help="take ppl/ppl_shuf from dataset fields instead of scoring")


def _add_detector_flags(p: _Parser) -> None:
    p.add_argument("--upsilon", choices=["none", "d", "r", "lr"], default="none")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--no-implausibility", action="store_true")
    p.add_argument("--logic", choices=["majority_consensus", "mean_probability"],
                   default="majority_consensus")


def _add_fit_flags(p: _Parser) -> None:
    p.add_argument("--families", default=None,
                   help="comma-separated family names (default: all eleven)")
    p.add_argument("--bootstrap-B", dest="bootstrap_b", type=int, default=200)
    p.add_argument("--significance", type=float, default=0.05)
    p.add_argument("--alpha", type=float, default=0.01,
                   help="implausibility quantile level")
    p.add_argument("--no-outlier-removal", action="store_true")
    p.add_argument("--min-pairs", type=int, default=50)


def build_parser() -> _Parser:
    parser = _Parser(prog="shufdetect", description=__doc__)
    parser.add_argument("--config", default=None,
                        help="JSON file of flag defaults (long names, dashes or underscores)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shuffle", help="shuffle text from stdin")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", default=None)
    p.set_defaults(func=cmd_shuffle)

    p = sub.add_parser("score", help="perplexity of stdin text")
    _add_scorer_flags(p)
    p.add_argument("--input", default=None)
    p.add_argument("--pair", action="store_true",
                   help="also score the shuffled text and print the feature vector")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("fit", help="fit a repository from scored pairs")
    p.add_argument("--hgt", required=True, help="HGT pairs file (jsonl/csv)")
    p.add_argument("--mgt", required=True, help="MGT pairs file (jsonl/csv)")
    p.add_argument("--out", required=True)
    p.add_argument("--domain", default="default")
    p.add_argument("--seed", type=int, default=0)
    _add_fit_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("detect", help="classify texts from stdin")
    p.add_argument("--repo", required=True)
    _add_scorer_flags(p)
    _add_detector_flags(p)
    p.add_argument("--format", choices=["text", "jsonl"], default="text")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("eval", help="FPR/FNR of a repository on a labeled dataset")
    p.add_argument("--repo", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default=None)
    p.add_argument("--group-by", default=None)
    p.add_argument("--output", choices=["json", "table"], default="json")
    _add_scorer_flags(p)
    _add_detector_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gridsearch", help="sweep configurations, pick per-mode winners")
    p.add_argument("--fit-hgt", required=True)
    p.add_argument("--fit-mgt", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default=None)
    p.add_argument("--group-by", default="generator")
    _add_scorer_flags(p)
    _add_fit_flags(p)
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("stats", help="corpus statistics (readability, compressibility)")
    p.add_argument("--dataset", default=None)
    p.add_argument("--format", choices=["csv", "jsonl"], default=None)
    p.add_argument("--input", default=None)
    p.add_argument("--output", choices=["json", "table"], default="json")
    p.set_defaults(func=cmd_stats)

    return parser


def _apply_config(parser: _Parser, argv: list[str]) -> list[str]:
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise UsageError("--config needs a path")
    with open(argv[idx + 1], encoding="utf-8") as fh:
        defaults = json.load(fh)
    if not isinstance(defaults, dict):
        raise UsageError("config file must hold a JSON object")
    parser.set_defaults(**{k.replace("-", "_"): v for k, v in defaults.items()})
    return argv[:idx] + argv[idx + 2:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DetectorError as exc:
        print(f"error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
