from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from shufdetect.statfit import Family, FittedDist, sample

CLI = [sys.executable, "-m", "shufdetect.cli"]


def run(args, stdin="", check=True):
    proc = subprocess.run(CLI + args, input=stdin, text=True,
                          capture_output=True, timeout=600)
    if check and proc.returncode != 0:
        raise AssertionError(f"cli failed ({proc.returncode}): {proc.stderr}")
    return proc


def write_pairs(path, ratios, ppl=2.0):
    with open(path, "w") as fh:
        for r in ratios:
            fh.write(json.dumps({"ppl": ppl, "ppl_shuf": ppl * float(r)}) + "\n")


@pytest.fixture(scope="module")
def repo_file(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    hgt = sample(FittedDist(Family.GAMMA, (3.0, 1.02, 0.08)), 300, 11)
    mgt = sample(FittedDist(Family.GAMMA, (3.0, 2.0, 0.35)), 300, 12)
    write_pairs(tmp / "hgt.jsonl", hgt)
    write_pairs(tmp / "mgt.jsonl", mgt)
    out = tmp / "repo.json"
    proc = run(["fit", "--hgt", str(tmp / "hgt.jsonl"), "--mgt", str(tmp / "mgt.jsonl"),
                "--out", str(out), "--families", "gamma,normal",
                "--bootstrap-B", "99", "--seed", "4"])
    summary = json.loads(proc.stdout)
    assert summary["feature_set"]
    return str(out)


def test_shuffle_deterministic_stdout():
    text = "one two three. four five six! seven eight nine?\n"
    a = run(["shuffle", "--seed", "7"], stdin=text).stdout
    b = run(["shuffle", "--seed", "7"], stdin=text).stdout
    assert a == b
    assert sorted(a.split()) == sorted(text.split())


def test_unknown_flag_exits_one():
    proc = run(["shuffle", "--definitely-not-a-flag"], stdin="x.", check=False)
    assert proc.returncode == 1
    assert "usage error" in proc.stderr


def test_unknown_subcommand_exits_one():
    proc = run(["frobnicate"], stdin="", check=False)
    assert proc.returncode == 1


def test_missing_file_exits_two():
    proc = run(["detect", "--repo", "/no/such/repo.json"], stdin="", check=False)
    assert proc.returncode == 2


def test_score_pair_with_mock():
    proc = run(["score", "--pair", "--scorer", "mock:position", "--seed", "3"],
               stdin="alpha bravo charlie delta echo foxtrot golf.")
    doc = json.loads(proc.stdout)
    assert doc["ppl"] == pytest.approx(doc["ppl_shuf"], rel=1e-9)
    assert set(doc["features"]) == {"sum", "diff", "ratio", "logratio", "change"}


def test_detect_jsonl_roundtrip(repo_file):
    lines = (
        json.dumps({"id": "q1", "text": "steady calm words here. more steady words follow."})
        + "\n"
        + json.dumps({"id": "q2", "text": "our second sample text. short and plain again."})
        + "\n"
    )
    proc = run(["detect", "--repo", repo_file, "--scorer", "mock:order",
                "--format", "jsonl", "--seed", "9"], stdin=lines)
    out = [json.loads(l) for l in proc.stdout.splitlines()]
    assert [d["id"] for d in out] == ["q1", "q2"]
    for d in out:
        assert d["label"] in ("MGT", "HGT", "REJECT")
        assert set(d) == {"id", "label", "mgt_probability", "rejected_features", "votes"}


def test_detect_jobs_preserves_order(repo_file):
    lines = "".join(
        json.dumps({"id": f"r{i}", "text": f"word{i} comes first. then word{i} again."}) + "\n"
        for i in range(8)
    )
    a = run(["detect", "--repo", repo_file, "--scorer", "mock:order",
             "--format", "jsonl", "--seed", "1"], stdin=lines).stdout
    b = run(["detect", "--repo", repo_file, "--scorer", "mock:order",
             "--format", "jsonl", "--seed", "1", "--jobs", "3"], stdin=lines).stdout
    assert a == b


def test_detect_with_subprocess_scorer(repo_file):
    cmd = f"{sys.executable} -m shufdetect.mock_scorer --kind order"
    lines = json.dumps({"id": "x", "text": "zebra yak xerus walrus. vole urial tapir seal."}) + "\n"
    proc = run(["detect", "--repo", repo_file, "--scorer-cmd", cmd,
                "--format", "jsonl", "--seed", "2"], stdin=lines)
    doc = json.loads(proc.stdout)
    assert doc["id"] == "x"


def test_eval_with_dataset_pairs(repo_file, tmp_path):
    gen_h = sample(FittedDist(Family.GAMMA, (3.0, 1.02, 0.08)), 20, 31)
    gen_m = sample(FittedDist(Family.GAMMA, (3.0, 2.0, 0.35)), 20, 32)
    data = tmp_path / "data.jsonl"
    rows = []
    for i, r in enumerate(gen_h):
        rows.append({"id": f"h{i}", "text": "words here.", "label": "hgt",
                     "ppl": 2.0, "ppl_shuf": 2.0 * float(r)})
    for i, r in enumerate(gen_m):
        rows.append({"id": f"m{i}", "text": "words here.", "label": "mgt",
                     "ppl": 2.0, "ppl_shuf": 2.0 * float(r)})
    data.write_text("".join(json.dumps(r) + "\n" for r in rows))
    proc = run(["eval", "--repo", repo_file, "--dataset", str(data),
                "--pairs-from-dataset"])
    doc = json.loads(proc.stdout)
    assert {"fpr", "fnr", "reject_rate_hgt", "reject_rate_mgt"} <= set(doc)
    assert doc["fpr"] <= 0.3 and doc["fnr"] <= 0.3  # well-separated construction


def test_score_cache_file_reused(tmp_path):
    cache = tmp_path / "cache.jsonl"
    text = "alpha bravo charlie delta echo foxtrot golf hotel."
    a = run(["score", "--scorer", "mock:position", "--cache", str(cache)],
            stdin=text).stdout
    assert len(cache.read_text().splitlines()) == 1
    b = run(["score", "--scorer", "mock:position", "--cache", str(cache)],
            stdin=text).stdout
    assert a == b
    assert len(cache.read_text().splitlines()) == 1  # second run hit the cache


def test_stats_table(tmp_path):
    proc = run(["stats", "--output", "table"],
               stdin="The cat sat. The dog ran away today.\n\nA second paragraph sits here.")
    lines = proc.stdout.splitlines()
    assert lines[0].startswith("id\t")
    assert len(lines) == 2


def test_stats_flesch_value():
    proc = run(["stats"], stdin="The cat sat.")
    doc = json.loads(proc.stdout)
    assert doc["flesch_reading_ease"] == pytest.approx(119.19, abs=0.01)
    assert doc["paragraphs"] == 1 and doc["sentences"] == 1 and doc["words"] == 3


def test_gridsearch_smoke(tmp_path):
    gen_h = sample(FittedDist(Family.GAMMA, (3.0, 1.02, 0.08)), 260, 21)
    gen_m = sample(FittedDist(Family.GAMMA, (3.0, 2.0, 0.35)), 260, 22)
    write_pairs(tmp_path / "fit_h.jsonl", gen_h[:200])
    write_pairs(tmp_path / "fit_m.jsonl", gen_m[:200])
    data = tmp_path / "test.jsonl"
    with open(data, "w") as fh:
        for i, r in enumerate(gen_h[200:230]):
            fh.write(json.dumps({"id": f"h{i}", "text": "irrelevant words here.",
                                 "label": "hgt", "generator": f"g{i % 2}",
                                 "ppl": 2.0, "ppl_shuf": 2.0 * float(r)}) + "\n")
        for i, r in enumerate(gen_m[200:230]):
            fh.write(json.dumps({"id": f"m{i}", "text": "irrelevant words here.",
                                 "label": "mgt", "generator": f"g{i % 2}",
                                 "ppl": 2.0, "ppl_shuf": 2.0 * float(r)}) + "\n")
    proc = run(["gridsearch", "--fit-hgt", str(tmp_path / "fit_h.jsonl"),
                "--fit-mgt", str(tmp_path / "fit_m.jsonl"),
                "--dataset", str(data), "--families", "gamma",
                "--bootstrap-B", "99", "--seed", "3", "--pairs-from-dataset"],
               check=False)
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    assert "low_fpr" in doc and "low_fnr" in doc
    assert doc["low_fpr"]["winner"]


def test_config_file_presets_flags(tmp_path):
    cfgfile = tmp_path / "conf.json"
    cfgfile.write_text(json.dumps({"seed": 7}))
    text = "one two three. four five six! seven eight nine?\n"
    via_config = run(["--config", str(cfgfile), "shuffle"], stdin=text).stdout
    explicit = run(["shuffle", "--seed", "7"], stdin=text).stdout
    assert via_config == explicit
