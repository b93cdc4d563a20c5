"""Pure-numpy density kernels (fallback path; scipy provides the specials).

Every function here has a numba twin in ``_kernels_numba`` with the same name
and signature; the backend module picks one set at import time.  Log-density
functions return -inf outside the support, and also at measure-zero boundary
points where the literal density would be infinite, so downstream consumers
always see finite non-negative densities.
"""

from __future__ import annotations

import numpy as np
from scipy import special

_LOG_2PI = float(np.log(2.0 * np.pi))


def _finite_logpdf(out: np.ndarray) -> np.ndarray:
    out[~np.isfinite(out) & (out > 0)] = -np.inf
    np.nan_to_num(out, copy=False, nan=-np.inf, posinf=-np.inf, neginf=-np.inf)
    return out


# --- normal ---------------------------------------------------------------

def normal_logpdf(x, mu, sigma):
    z = (x - mu) / sigma
    return -0.5 * z * z - np.log(sigma) - 0.5 * _LOG_2PI


def normal_cdf(x, mu, sigma):
    return special.ndtr((x - mu) / sigma)


def normal_nll(x, mu, sigma):
    return float(-np.sum(normal_logpdf(x, mu, sigma)))


# --- lognormal ------------------------------------------------------------

def lognormal_logpdf(x, s, loc, scale):
    y = (x - loc) / scale
    out = np.full(x.shape, -np.inf)
    ok = y > 0
    ly = np.log(y[ok])
    out[ok] = -np.log(y[ok] * s * scale) - 0.5 * _LOG_2PI - 0.5 * (ly / s) ** 2
    return _finite_logpdf(out)


def lognormal_cdf(x, s, loc, scale):
    y = (x - loc) / scale
    out = np.zeros(x.shape)
    ok = y > 0
    out[ok] = special.ndtr(np.log(y[ok]) / s)
    return out


def lognormal_nll(x, s, loc, scale):
    return float(-np.sum(lognormal_logpdf(x, s, loc, scale)))


# --- student t ------------------------------------------------------------

def studentt_logpdf(x, df, loc, scale):
    z = (x - loc) / scale
    lognorm = (special.gammaln(0.5 * (df + 1.0)) - special.gammaln(0.5 * df)
               - 0.5 * np.log(df * np.pi) - np.log(scale))
    return lognorm - 0.5 * (df + 1.0) * np.log1p(z * z / df)


def studentt_cdf(x, df, loc, scale):
    return special.stdtr(df, (x - loc) / scale)


def studentt_nll(x, df, loc, scale):
    return float(-np.sum(studentt_logpdf(x, df, loc, scale)))


# --- exponential ----------------------------------------------------------

def exponential_logpdf(x, loc, scale):
    y = (x - loc) / scale
    out = np.full(x.shape, -np.inf)
    ok = y >= 0
    out[ok] = -y[ok] - np.log(scale)
    return out


def exponential_cdf(x, loc, scale):
    y = (x - loc) / scale
    return np.where(y >= 0, -np.expm1(-np.maximum(y, 0.0)), 0.0)


def exponential_nll(x, loc, scale):
    return float(-np.sum(exponential_logpdf(x, loc, scale)))


# --- powerlaw (pdf = a*y^(a-1) on y in [0, 1]) ------------------------------

def powerlaw_logpdf(x, a, loc, scale):
    y = (x - loc) / scale
    out = np.full(x.shape, -np.inf)
    ok = (y > 0) & (y <= 1)
    with np.errstate(divide="ignore"):
        out[ok] = np.log(a) + (a - 1.0) * np.log(y[ok]) - np.log(scale)
    return _finite_logpdf(out)


def powerlaw_cdf(x, a, loc, scale):
    y = np.clip((x - loc) / scale, 0.0, 1.0)
    return y**a


def powerlaw_nll(x, a, loc, scale):
    return float(-np.sum(powerlaw_logpdf(x, a, loc, scale)))


# --- gamma ------------------------------------------------------------------

def gamma_logpdf(x, shape, loc, scale):
    y = (x - loc) / scale
    out = np.full(x.shape, -np.inf)
    ok = y > 0
    with np.errstate(divide="ignore"):
        out[ok] = ((shape - 1.0) * np.log(y[ok]) - y[ok]
                   - special.gammaln(shape) - np.log(scale))
    if shape == 1.0:
        out[y == 0] = -np.log(scale)
    return _finite_logpdf(out)


def gamma_cdf(x, shape, loc, scale):
    y = np.maximum((x - loc) / scale, 0.0)
    return special.gammainc(shape, y)


def gamma_nll(x, shape, loc, scale):
    return float(-np.sum(gamma_logpdf(x, shape, loc, scale)))


# --- weibull ----------------------------------------------------------------

def weibull_logpdf(x, c, loc, scale):
    y = (x - loc) / scale
    out = np.full(x.shape, -np.inf)
    ok = y > 0
    with np.errstate(divide="ignore"):
        yc = y[ok] ** c
        out[ok] = np.log(c) + (c - 1.0) * np.log(y[ok]) - yc - np.log(scale)
    if c == 1.0:
        out[y == 0] = -np.log(scale)
    return _finite_logpdf(out)


def weibull_cdf(x, c, loc, scale):
    y = np.maximum((x - loc) / scale, 0.0)
    return -np.expm1(-(y**c))


def weibull_nll(x, c, loc, scale):
    return float(-np.sum(weibull_logpdf(x, c, loc, scale)))


# --- beta -------------------------------------------------------------------

def beta_logpdf(x, a, b, loc, scale):
    y = (x - loc) / scale
    out = np.full(x.shape, -np.inf)
    ok = (y > 0) & (y < 1)
    with np.errstate(divide="ignore"):
        out[ok] = ((a - 1.0) * np.log(y[ok]) + (b - 1.0) * np.log1p(-y[ok])
                   - (special.gammaln(a) + special.gammaln(b) - special.gammaln(a + b))
                   - np.log(scale))
    return _finite_logpdf(out)


def beta_cdf(x, a, b, loc, scale):
    y = np.clip((x - loc) / scale, 0.0, 1.0)
    return special.betainc(a, b, y)


def beta_nll(x, a, b, loc, scale):
    return float(-np.sum(beta_logpdf(x, a, b, loc, scale)))


# --- burr type XII ----------------------------------------------------------

def burr_logpdf(x, c, d, loc, scale):
    y = (x - loc) / scale
    out = np.full(x.shape, -np.inf)
    ok = y > 0
    with np.errstate(divide="ignore"):
        ly = np.log(y[ok])
        out[ok] = (np.log(c) + np.log(d) + (c - 1.0) * ly
                   - (d + 1.0) * np.logaddexp(0.0, c * ly) - np.log(scale))
    if c == 1.0:
        out[y == 0] = np.log(d) - np.log(scale)
    return _finite_logpdf(out)


def burr_cdf(x, c, d, loc, scale):
    y = np.maximum((x - loc) / scale, 0.0)
    out = np.zeros(y.shape)
    pos = y > 0
    with np.errstate(divide="ignore"):
        out[pos] = -np.expm1(-d * np.logaddexp(0.0, c * np.log(y[pos])))
    return out


def burr_nll(x, c, d, loc, scale):
    return float(-np.sum(burr_logpdf(x, c, d, loc, scale)))


# --- pareto (support y >= 1) -------------------------------------------------

def pareto_logpdf(x, b, loc, scale):
    y = (x - loc) / scale
    out = np.full(x.shape, -np.inf)
    ok = y >= 1
    out[ok] = np.log(b) - (b + 1.0) * np.log(y[ok]) - np.log(scale)
    return out


def pareto_cdf(x, b, loc, scale):
    y = np.maximum((x - loc) / scale, 1.0)
    return 1.0 - y ** (-b)


def pareto_nll(x, b, loc, scale):
    return float(-np.sum(pareto_logpdf(x, b, loc, scale)))


# --- generalized extreme value ----------------------------------------------
# Shape follows the sign convention where xi > 0 gives the heavy right tail.

def gev_logpdf(x, xi, loc, scale):
    z = (x - loc) / scale
    if abs(xi) < 1e-12:
        return -z - np.exp(-z) - np.log(scale)
    u = 1.0 + xi * z
    out = np.full(x.shape, -np.inf)
    ok = u > 0
    lu = np.log(u[ok])
    out[ok] = -(1.0 + 1.0 / xi) * lu - np.exp(-lu / xi) - np.log(scale)
    return _finite_logpdf(out)


def gev_cdf(x, xi, loc, scale):
    z = (x - loc) / scale
    if abs(xi) < 1e-12:
        return np.exp(-np.exp(-z))
    u = 1.0 + xi * z
    out = np.where(u > 0, np.exp(-np.maximum(u, 1e-300) ** (-1.0 / xi)), 0.0)
    if xi < 0:
        out[u <= 0] = 1.0
    return out


def gev_nll(x, xi, loc, scale):
    return float(-np.sum(gev_logpdf(x, xi, loc, scale)))
