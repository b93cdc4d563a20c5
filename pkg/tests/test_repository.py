from __future__ import annotations

import json
import math

import numpy as np
import pytest

from shufdetect.errors import CorruptFile, EmptyFeatureSet, InsufficientData, SchemaMismatch
from shufdetect.features import FeatureType, PerplexityPair
from shufdetect.repository import (
    HGT,
    MGT,
    FitOptions,
    fit_repository,
    load,
    save,
)
from shufdetect.scoring import ScorerMeta
from shufdetect.statfit import Family, FittedDist, pdf, quantile, sample


def pairs_from_ratio(ratios, ppl=2.0):
    return [PerplexityPair(ppl, ppl * r) for r in ratios]


@pytest.fixture(scope="module")
def gamma_ratio_repo():
    # HGT ratio ~ 0.6 + Gamma(3, 0.45), MGT ratio ~ 0.6 + Gamma(5, 0.9):
    # the true family must beat Normal on both classes
    hgt_r = sample(FittedDist(Family.GAMMA, (3.0, 0.6, 0.45)), 1000, 101)
    mgt_r = sample(FittedDist(Family.GAMMA, (5.0, 0.6, 0.9)), 1000, 202)
    options = FitOptions(families=(Family.GAMMA, Family.NORMAL), bootstrap_b=99,
                         outlier_removal=False, seed=7)
    return fit_repository(pairs_from_ratio(hgt_r), pairs_from_ratio(mgt_r),
                          options, domain_id="synthetic-gamma",
                          scorer_meta=ScorerMeta("mock", 2048, 1024))


def test_true_family_selected_for_ratio(gamma_ratio_repo):
    repo = gamma_ratio_repo
    assert FeatureType.RATIO in repo.feature_set
    assert repo.entry(FeatureType.RATIO, MGT).dist.family is Family.GAMMA
    assert repo.entry(FeatureType.RATIO, HGT).dist.family is Family.GAMMA


def test_entry_count_is_twice_feature_set(gamma_ratio_repo):
    repo = gamma_ratio_repo
    assert len(repo.entries) == 2 * len(repo.feature_set)
    for f in repo.feature_set:
        assert repo.entry(f, MGT) is not None
        assert repo.entry(f, HGT) is not None


def test_entries_pass_significance_and_family_list(gamma_ratio_repo):
    repo = gamma_ratio_repo
    for e in repo.entries:
        assert e.boot_p > repo.significance
        assert e.dist.family in (Family.GAMMA, Family.NORMAL)


def test_tau_positive_and_hand_recomputable(gamma_ratio_repo):
    repo = gamma_ratio_repo
    hgt_r = sample(FittedDist(Family.GAMMA, (3.0, 0.6, 0.45)), 1000, 101)
    mgt_r = sample(FittedDist(Family.GAMMA, (5.0, 0.6, 0.9)), 1000, 202)
    samples = {HGT: hgt_r, MGT: mgt_r}
    for f in repo.feature_set:
        assert repo.tau[f] > 0
        taus = {}
        for label, ratios in samples.items():
            zs = np.array([_z(f, r) for r in ratios])
            taus[label] = quantile(pdf(repo.entry(f, label).dist, zs), repo.alpha_impl)
        assert repo.tau[f] == pytest.approx(min(taus.values()), rel=1e-12)
        assert repo.tau_source[f] == min(taus, key=taus.get)


def _z(feature, r, ppl=2.0):
    pair = PerplexityPair(ppl, ppl * r)
    from shufdetect.features import compute_feature
    return compute_feature(pair, feature)


def test_false_rejection_budget(gamma_ratio_repo):
    repo = gamma_ratio_repo
    hgt_r = sample(FittedDist(Family.GAMMA, (3.0, 0.6, 0.45)), 1000, 101)
    mgt_r = sample(FittedDist(Family.GAMMA, (5.0, 0.6, 0.9)), 1000, 202)
    for f in repo.feature_set:
        for label, ratios in ((HGT, hgt_r), (MGT, mgt_r)):
            zs = np.array([_z(f, r) for r in ratios])
            vals = pdf(repo.entry(f, label).dist, zs)
            below = int(np.sum(vals < repo.tau[f]))
            assert below <= math.ceil(repo.alpha_impl * len(vals))


def test_bimodal_features_are_excluded():
    gen = np.random.default_rng(55)
    # strongly bimodal ppl makes sum and diff bimodal; ratio stays clean Gamma
    def make(seed_a, seed_b, ratio_params):
        g = np.random.default_rng(seed_a)
        n = 400
        ppl = np.where(g.random(n) < 0.5, g.normal(1.5, 0.04, n), g.normal(7.0, 0.1, n))
        ratios = sample(FittedDist(Family.GAMMA, ratio_params), n, seed_b)
        return [PerplexityPair(p, p * r) for p, r in zip(ppl, ratios)]

    hgt = make(1, 2, (2.0, 1.2, 0.2))
    mgt = make(3, 4, (3.0, 1.3, 0.3))
    options = FitOptions(families=(Family.EXPONENTIAL, Family.GAMMA), bootstrap_b=99,
                         outlier_removal=False, seed=11)
    repo = fit_repository(hgt, mgt, options)
    assert FeatureType.DIFF not in repo.feature_set
    assert FeatureType.SUM not in repo.feature_set
    assert FeatureType.RATIO in repo.feature_set


def test_empty_feature_set_raises():
    gen = np.random.default_rng(9)
    n = 300
    # every feature bimodal, exponential can fit none of them
    ppl = np.where(gen.random(n) < 0.5, 1.5, 9.0) + gen.normal(0, 0.01, n)
    ratios = np.where(gen.random(n) < 0.5, 1.1, 4.0) + gen.normal(0, 0.005, n)
    pairs = [PerplexityPair(p, p * r) for p, r in zip(ppl, ratios)]
    options = FitOptions(families=(Family.EXPONENTIAL,), bootstrap_b=99,
                         outlier_removal=False, seed=1)
    with pytest.raises(EmptyFeatureSet):
        fit_repository(pairs, pairs, options)


def test_min_pairs_floor():
    pairs = pairs_from_ratio([1.5] * 10)
    with pytest.raises(InsufficientData):
        fit_repository(pairs, pairs, FitOptions())


def test_outlier_removal_recorded():
    hgt_r = sample(FittedDist(Family.GAMMA, (3.0, 1.0, 0.2)), 500, 61)
    mgt_r = sample(FittedDist(Family.GAMMA, (4.0, 1.3, 0.4)), 500, 62)
    hgt = pairs_from_ratio(hgt_r)
    mgt = pairs_from_ratio(np.append(mgt_r[:-1], 80.0))  # one wild pair
    options = FitOptions(families=(Family.GAMMA,), bootstrap_b=99, seed=3)
    repo = fit_repository(hgt, mgt, options)
    assert repo.provenance["outlier_removal"] is True
    assert repo.provenance["outlier_fraction"][MGT] > 0
    assert repo.feature_set  # clean in-family data still fits after filtering


def test_rebuild_is_deterministic(gamma_ratio_repo):
    hgt_r = sample(FittedDist(Family.GAMMA, (3.0, 0.6, 0.45)), 1000, 101)
    mgt_r = sample(FittedDist(Family.GAMMA, (5.0, 0.6, 0.9)), 1000, 202)
    options = FitOptions(families=(Family.GAMMA, Family.NORMAL), bootstrap_b=99,
                         outlier_removal=False, seed=7)
    rebuilt = fit_repository(pairs_from_ratio(hgt_r), pairs_from_ratio(mgt_r),
                             options, domain_id="synthetic-gamma",
                             scorer_meta=ScorerMeta("mock", 2048, 1024))
    assert rebuilt == gamma_ratio_repo


def test_save_load_round_trip(gamma_ratio_repo, tmp_path):
    path = str(tmp_path / "repo.json")
    save(gamma_ratio_repo, path)
    loaded = load(path)
    assert loaded == gamma_ratio_repo
    for a, b in zip(loaded.entries, gamma_ratio_repo.entries):
        for va, vb in zip(a.dist.params, b.dist.params):
            assert va == vb  # bit-exact


def test_load_missing_tau_is_schema_mismatch(gamma_ratio_repo, tmp_path):
    path = str(tmp_path / "repo.json")
    save(gamma_ratio_repo, path)
    doc = json.loads(open(path).read())
    del doc["tau"]
    open(path, "w").write(json.dumps(doc))
    with pytest.raises(SchemaMismatch):
        load(path)


def test_load_wrong_version(gamma_ratio_repo, tmp_path):
    path = str(tmp_path / "repo.json")
    save(gamma_ratio_repo, path)
    doc = json.loads(open(path).read())
    doc["schema_version"] = 99
    open(path, "w").write(json.dumps(doc))
    with pytest.raises(SchemaMismatch):
        load(path)


def test_load_corrupt_file(tmp_path):
    path = str(tmp_path / "repo.json")
    open(path, "w").write("{ not json")
    with pytest.raises(CorruptFile):
        load(path)
