from __future__ import annotations

import numpy as np
import pytest

from shufdetect.errors import InsufficientData
from shufdetect.features import PerplexityPair
from shufdetect.statfit import iqr_filter, quantile


def test_quantile_median():
    assert quantile([1, 2, 3, 4, 5], 0.5) == 3.0


def test_quantile_interpolated():
    # h = 0.25 * 4 = 1 lands exactly on the second order statistic
    assert quantile([1, 2, 3, 4, 5], 0.25) == 2.0
    # between order statistics: h = 0.1 * 4 = 0.4
    assert quantile([1, 2, 3, 4, 5], 0.1) == pytest.approx(1.4)


def test_quantile_extremes(rng):
    xs = rng.normal(0, 1, 37)
    assert quantile(xs, 0.0) == xs.min()
    assert quantile(xs, 1.0) == xs.max()


def test_quantile_bad_alpha():
    with pytest.raises(ValueError):
        quantile([1.0], 1.5)
    with pytest.raises(InsufficientData):
        quantile([], 0.5)


def pairs_from(ppl, shuf):
    return [PerplexityPair(a, b) for a, b in zip(ppl, shuf)]


def test_iqr_flags_outlier_hand_example():
    # ppl values {1,2,3,4,100}: Q1=2, Q3=4, bounds [-1, 7] -> 100 flagged
    ppl = [1, 2, 3, 4, 100, 2, 3, 4]
    assert quantile([1, 2, 3, 4, 100], 0.25) == 2.0
    assert quantile([1, 2, 3, 4, 100], 0.75) == 4.0
    shuf = [2.0] * 8
    mask = iqr_filter(pairs_from(ppl, shuf))
    assert list(mask) == [True, True, True, True, False, True, True, True]


def test_iqr_identical_values_keep_all():
    mask = iqr_filter(pairs_from([3.0] * 10, [5.0] * 10))
    assert mask.all()


def test_iqr_either_variable_can_flag():
    ppl = [2.0, 2.1, 2.2, 2.0, 2.1, 2.2, 2.0, 2.1]
    shuf = [3.0, 3.1, 3.2, 3.0, 3.1, 3.2, 3.0, 90.0]
    mask = iqr_filter(pairs_from(ppl, shuf))
    assert list(mask) == [True] * 7 + [False]


def test_iqr_needs_eight_pairs():
    with pytest.raises(InsufficientData):
        iqr_filter(pairs_from([1.0] * 7, [1.0] * 7))


def test_iqr_removal_rate_near_five_percent():
    # moderately heavy-tailed traffic tuned so the 1.5 IQR rule trims ~5%
    gen = np.random.default_rng(99)
    n = 20000
    ppl = np.maximum(8.0 + 2.0 * gen.standard_t(8, n), 1.0)
    shuf = np.maximum(12.0 + 3.0 * gen.standard_t(8, n), 1.0)
    mask = iqr_filter(pairs_from(ppl, shuf))
    rate = 1.0 - mask.mean()
    assert abs(rate - 0.05) <= 0.03
