from __future__ import annotations

import math

import numpy as np
import pytest

import shufdetect.statfit._kernels_numpy as knp
from shufdetect.errors import InvalidParams
from shufdetect.statfit import Family, FittedDist, cdf, log_pdf, pdf, sample

try:
    import shufdetect.statfit._kernels_numba as knb
    HAVE_NUMBA = True
except ImportError:
    knb = None
    HAVE_NUMBA = False

# one representative parameter point per family, inside the documented
# well-behaved region (all shapes moderate, scale O(1))
POINTS = {
    Family.NORMAL: (2.0, 3.0),
    Family.LOGNORMAL: (0.6, 0.5, 2.5),
    Family.STUDENT_T: (6.0, 1.0, 2.0),
    Family.EXPONENTIAL: (0.5, 2.0),
    Family.POWERLAW: (2.2, 0.1, 3.0),
    Family.GAMMA: (3.0, 0.2, 2.0),
    Family.WEIBULL: (1.8, 0.1, 2.0),
    Family.BETA: (2.0, 5.0, 0.0, 1.0),
    Family.BURR: (2.5, 1.5, 0.1, 2.0),
    Family.PARETO: (2.5, 0.0, 1.5),
    Family.GEV: (0.15, 2.0, 1.5),
}


def dist(family):
    return FittedDist(family, POINTS[family])


def support_grid(family, n=2001):
    xs = sample(dist(family), 4000, 99)
    lo, hi = np.quantile(xs, 0.001), np.quantile(xs, 0.999)
    return np.linspace(lo, hi, n)


# --- spot values ------------------------------------------------------------

def test_gamma_reduces_to_exponential():
    g = FittedDist(Family.GAMMA, (1.0, 0.0, 1.0))
    assert pdf(g, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)


def test_burr_closed_form_point():
    b = FittedDist(Family.BURR, (1.0, 1.0, 0.0, 1.0))
    assert pdf(b, 1.0) == pytest.approx(0.25, rel=1e-12)


def test_standard_normal_mode():
    n = FittedDist(Family.NORMAL, (0.0, 1.0))
    assert pdf(n, 0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi), rel=1e-12)


def test_pdf_zero_outside_support():
    g = FittedDist(Family.GAMMA, (2.0, 1.0, 1.0))
    assert pdf(g, 0.5) == 0.0
    assert cdf(g, 0.5) == 0.0
    p = FittedDist(Family.PARETO, (2.0, 0.0, 1.0))
    assert pdf(p, 0.9) == 0.0
    b = FittedDist(Family.BETA, (2.0, 2.0, 0.0, 1.0))
    assert pdf(b, 1.2) == 0.0
    assert cdf(b, 1.2) == 1.0


@pytest.mark.parametrize("family", list(Family))
def test_pdf_nonnegative_cdf_monotone(family):
    grid = support_grid(family)
    p = pdf(dist(family), grid)
    c = cdf(dist(family), grid)
    assert np.all(p >= 0)
    assert np.all(np.isfinite(p))
    assert np.all(np.diff(c) >= -1e-12)
    assert -1e-9 <= c[0] and c[-1] <= 1 + 1e-9


@pytest.mark.parametrize("family", list(Family))
def test_pdf_integrates_to_one(family):
    # trapezoid over the covered bulk plus the cdf mass outside it
    grid = support_grid(family, n=20001)
    p = pdf(dist(family), grid)
    bulk = np.trapezoid(p, grid)
    tails = cdf(dist(family), grid[0]) + (1.0 - cdf(dist(family), grid[-1]))
    assert bulk + tails == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("family", list(Family))
def test_cdf_derivative_matches_pdf(family):
    gen = np.random.default_rng(5)
    xs = sample(dist(family), 3000, 77)
    lo, hi = np.quantile(xs, 0.02), np.quantile(xs, 0.98)
    points = gen.uniform(lo, hi, 100)
    h = 1e-6 * max(abs(hi - lo), 1.0)
    d = dist(family)
    deriv = (cdf(d, points + h) - cdf(d, points - h)) / (2 * h)
    dens = pdf(d, points)
    mask = dens > 1e-12
    assert np.allclose(deriv[mask], dens[mask], rtol=1e-4, atol=1e-9)


# --- backend conformance -----------------------------------------------------

@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
@pytest.mark.parametrize("family", list(Family))
def test_numba_numpy_agree(family):
    grid = support_grid(family, n=4001)
    params = POINTS[family]
    name = family.value
    lp_np = getattr(knp, f"{name}_logpdf")(grid, *params)
    lp_nb = getattr(knb, f"{name}_logpdf")(grid, *params)
    both_finite = np.isfinite(lp_np) & np.isfinite(lp_nb)
    assert np.array_equal(np.isfinite(lp_np), np.isfinite(lp_nb))
    assert np.allclose(lp_np[both_finite], lp_nb[both_finite], rtol=1e-10, atol=1e-10)
    c_np = getattr(knp, f"{name}_cdf")(grid, *params)
    c_nb = getattr(knb, f"{name}_cdf")(grid, *params)
    assert np.allclose(c_np, c_nb, rtol=1e-9, atol=1e-10)
    n_np = getattr(knp, f"{name}_nll")(grid[both_finite], *params)
    n_nb = getattr(knb, f"{name}_nll")(grid[both_finite], *params)
    assert n_np == pytest.approx(n_nb, rel=1e-10)


# --- sampling -----------------------------------------------------------------

def test_sample_deterministic_under_seed():
    for family in Family:
        a = sample(dist(family), 5, 123)
        b = sample(dist(family), 5, 123)
        assert np.array_equal(a, b)


def test_exponential_sample_mean():
    xs = sample(FittedDist(Family.EXPONENTIAL, (0.0, 2.0)), 100_000, 11)
    assert abs(xs.mean() - 2.0) < 0.05  # 3 sigma bound at this n


def test_normal_sample_skewness():
    xs = sample(FittedDist(Family.NORMAL, (0.0, 1.0)), 100_000, 13)
    skew = np.mean((xs - xs.mean()) ** 3) / xs.std() ** 3
    assert abs(skew) < 0.05


@pytest.mark.parametrize("family", list(Family))
def test_sample_matches_cdf(family):
    # KS distance between a big sample and the parent cdf stays small
    d = dist(family)
    xs = np.sort(sample(d, 20000, 31))
    f = cdf(d, xs)
    n = xs.size
    i = np.arange(1, n + 1) / n
    dist_ks = max(np.max(i - f), np.max(f - (i - 1 / n)))
    assert dist_ks < 0.015


def test_invalid_params():
    with pytest.raises(InvalidParams):
        pdf(FittedDist(Family.GAMMA, (-1.0, 0.0, 1.0)), 1.0)
    with pytest.raises(InvalidParams):
        pdf(FittedDist(Family.NORMAL, (0.0, 0.0)), 1.0)
    with pytest.raises(InvalidParams):
        pdf(FittedDist(Family.NORMAL, (0.0,)), 1.0)
    with pytest.raises(InvalidParams):
        sample(FittedDist(Family.BURR, (1.0, 1.0, 0.0, -2.0)), 3, 1)
