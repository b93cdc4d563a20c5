"""Numba-jitted density kernels: the hot path for MLE and the bootstrap.

Same function names and semantics as ``_kernels_numpy``.  The regularized
incomplete gamma/beta functions are implemented here with the classic
series/continued-fraction split so the jitted path has no scipy dependency;
agreement with scipy is pinned by the backend conformance tests.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_LOG_2PI = math.log(2.0 * math.pi)
_NJIT = dict(cache=True, fastmath=False)


# --- special functions ------------------------------------------------------

@njit(**_NJIT)
def _gammainc_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        ap = a
        total = 1.0 / a
        delta = total
        for _ in range(800):
            ap += 1.0
            delta *= x / ap
            total += delta
            if abs(delta) < abs(total) * 1e-16:
                break
        return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 800):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    q = math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    return 1.0 - q


@njit(**_NJIT)
def _betacf(a: float, b: float, x: float) -> float:
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 800):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h


@njit(**_NJIT)
def _betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


@njit(**_NJIT)
def _norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


# --- normal -----------------------------------------------------------------

@njit(**_NJIT)
def normal_logpdf(x, mu, sigma):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        z = (x[i] - mu) / sigma
        out[i] = -0.5 * z * z - math.log(sigma) - 0.5 * _LOG_2PI
    return out


@njit(**_NJIT)
def normal_cdf(x, mu, sigma):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _norm_cdf((x[i] - mu) / sigma)
    return out


@njit(**_NJIT)
def normal_nll(x, mu, sigma):
    acc = 0.0
    for i in range(x.shape[0]):
        z = (x[i] - mu) / sigma
        acc += 0.5 * z * z
    return acc + x.shape[0] * (math.log(sigma) + 0.5 * _LOG_2PI)


# --- lognormal ----------------------------------------------------------------

@njit(**_NJIT)
def lognormal_logpdf(x, s, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y <= 0.0:
            out[i] = -np.inf
        else:
            ly = math.log(y)
            out[i] = (-math.log(y * s * scale) - 0.5 * _LOG_2PI
                      - 0.5 * (ly / s) * (ly / s))
    return out


@njit(**_NJIT)
def lognormal_cdf(x, s, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        out[i] = _norm_cdf(math.log(y) / s) if y > 0.0 else 0.0
    return out


@njit(**_NJIT)
def lognormal_nll(x, s, loc, scale):
    acc = 0.0
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y <= 0.0:
            return np.inf
        ly = math.log(y)
        acc += math.log(y * s * scale) + 0.5 * _LOG_2PI + 0.5 * (ly / s) * (ly / s)
    return acc


# --- student t -----------------------------------------------------------------

@njit(**_NJIT)
def studentt_logpdf(x, df, loc, scale):
    lognorm = (math.lgamma(0.5 * (df + 1.0)) - math.lgamma(0.5 * df)
               - 0.5 * math.log(df * math.pi) - math.log(scale))
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        z = (x[i] - loc) / scale
        out[i] = lognorm - 0.5 * (df + 1.0) * math.log1p(z * z / df)
    return out


@njit(**_NJIT)
def studentt_cdf(x, df, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        t = (x[i] - loc) / scale
        w = df / (df + t * t)
        ib = 0.5 * _betainc_reg(0.5 * df, 0.5, w)
        out[i] = 1.0 - ib if t >= 0.0 else ib
    return out


@njit(**_NJIT)
def studentt_nll(x, df, loc, scale):
    lognorm = (math.lgamma(0.5 * (df + 1.0)) - math.lgamma(0.5 * df)
               - 0.5 * math.log(df * math.pi) - math.log(scale))
    acc = 0.0
    for i in range(x.shape[0]):
        z = (x[i] - loc) / scale
        acc += 0.5 * (df + 1.0) * math.log1p(z * z / df)
    return acc - x.shape[0] * lognorm


# --- exponential -----------------------------------------------------------------

@njit(**_NJIT)
def exponential_logpdf(x, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        out[i] = -y - math.log(scale) if y >= 0.0 else -np.inf
    return out


@njit(**_NJIT)
def exponential_cdf(x, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        out[i] = -math.expm1(-y) if y > 0.0 else 0.0
    return out


@njit(**_NJIT)
def exponential_nll(x, loc, scale):
    acc = 0.0
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y < 0.0:
            return np.inf
        acc += y
    return acc + x.shape[0] * math.log(scale)


# --- powerlaw -----------------------------------------------------------------

@njit(**_NJIT)
def powerlaw_logpdf(x, a, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y <= 0.0 or y > 1.0:
            out[i] = -np.inf
        else:
            out[i] = math.log(a) + (a - 1.0) * math.log(y) - math.log(scale)
    return out


@njit(**_NJIT)
def powerlaw_cdf(x, a, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y <= 0.0:
            out[i] = 0.0
        elif y >= 1.0:
            out[i] = 1.0
        else:
            out[i] = y**a
    return out


@njit(**_NJIT)
def powerlaw_nll(x, a, loc, scale):
    acc = 0.0
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y <= 0.0 or y > 1.0:
            return np.inf
        acc += (a - 1.0) * math.log(y)
    return -acc - x.shape[0] * (math.log(a) - math.log(scale))


# --- gamma -----------------------------------------------------------------

@njit(**_NJIT)
def gamma_logpdf(x, shape, loc, scale):
    lg = math.lgamma(shape)
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y > 0.0:
            out[i] = (shape - 1.0) * math.log(y) - y - lg - math.log(scale)
        elif y == 0.0 and shape == 1.0:
            out[i] = -math.log(scale)
        else:
            out[i] = -np.inf
    return out


@njit(**_NJIT)
def gamma_cdf(x, shape, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        out[i] = _gammainc_p(shape, y) if y > 0.0 else 0.0
    return out


@njit(**_NJIT)
def gamma_nll(x, shape, loc, scale):
    lg = math.lgamma(shape)
    acc = 0.0
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y <= 0.0:
            return np.inf
        acc += y - (shape - 1.0) * math.log(y)
    return acc + x.shape[0] * (lg + math.log(scale))


# --- weibull -----------------------------------------------------------------

@njit(**_NJIT)
def weibull_logpdf(x, c, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y > 0.0:
            out[i] = (math.log(c) + (c - 1.0) * math.log(y)
                      - math.exp(c * math.log(y)) - math.log(scale))
        elif y == 0.0 and c == 1.0:
            out[i] = -math.log(scale)
        else:
            out[i] = -np.inf
    return out


@njit(**_NJIT)
def weibull_cdf(x, c, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        out[i] = -math.expm1(-(y**c)) if y > 0.0 else 0.0
    return out


@njit(**_NJIT)
def weibull_nll(x, c, loc, scale):
    acc = 0.0
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y <= 0.0:
            return np.inf
        ly = math.log(y)
        acc += math.exp(c * ly) - (c - 1.0) * ly
    return acc - x.shape[0] * (math.log(c) - math.log(scale))


# --- beta -----------------------------------------------------------------

@njit(**_NJIT)
def beta_logpdf(x, a, b, loc, scale):
    lbeta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if 0.0 < y < 1.0:
            out[i] = ((a - 1.0) * math.log(y) + (b - 1.0) * math.log1p(-y)
                      - lbeta - math.log(scale))
        else:
            out[i] = -np.inf
    return out


@njit(**_NJIT)
def beta_cdf(x, a, b, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        out[i] = _betainc_reg(a, b, y)
    return out


@njit(**_NJIT)
def beta_nll(x, a, b, loc, scale):
    lbeta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    acc = 0.0
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y <= 0.0 or y >= 1.0:
            return np.inf
        acc += (a - 1.0) * math.log(y) + (b - 1.0) * math.log1p(-y)
    return -acc + x.shape[0] * (lbeta + math.log(scale))


# --- burr type XII ------------------------------------------------------------

@njit(**_NJIT)
def burr_logpdf(x, c, d, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y > 0.0:
            ly = math.log(y)
            v = c * ly
            # log(1 + e^v), stable for large |v|
            l1p = v + math.log1p(math.exp(-v)) if v > 0.0 else math.log1p(math.exp(v))
            out[i] = (math.log(c) + math.log(d) + (c - 1.0) * ly
                      - (d + 1.0) * l1p - math.log(scale))
        elif y == 0.0 and c == 1.0:
            out[i] = math.log(d) - math.log(scale)
        else:
            out[i] = -np.inf
    return out


@njit(**_NJIT)
def burr_cdf(x, c, d, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y <= 0.0:
            out[i] = 0.0
        else:
            v = c * math.log(y)
            l1p = v + math.log1p(math.exp(-v)) if v > 0.0 else math.log1p(math.exp(v))
            out[i] = -math.expm1(-d * l1p)
    return out


@njit(**_NJIT)
def burr_nll(x, c, d, loc, scale):
    acc = 0.0
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y <= 0.0:
            return np.inf
        ly = math.log(y)
        v = c * ly
        l1p = v + math.log1p(math.exp(-v)) if v > 0.0 else math.log1p(math.exp(v))
        acc += (d + 1.0) * l1p - (c - 1.0) * ly
    return acc - x.shape[0] * (math.log(c) + math.log(d) - math.log(scale))


# --- pareto -----------------------------------------------------------------

@njit(**_NJIT)
def pareto_logpdf(x, b, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y >= 1.0:
            out[i] = math.log(b) - (b + 1.0) * math.log(y) - math.log(scale)
        else:
            out[i] = -np.inf
    return out


@njit(**_NJIT)
def pareto_cdf(x, b, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        out[i] = 1.0 - y ** (-b) if y > 1.0 else 0.0
    return out


@njit(**_NJIT)
def pareto_nll(x, b, loc, scale):
    acc = 0.0
    for i in range(x.shape[0]):
        y = (x[i] - loc) / scale
        if y < 1.0:
            return np.inf
        acc += (b + 1.0) * math.log(y)
    return acc - x.shape[0] * (math.log(b) - math.log(scale))


# --- generalized extreme value --------------------------------------------------

@njit(**_NJIT)
def gev_logpdf(x, xi, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        z = (x[i] - loc) / scale
        if abs(xi) < 1e-12:
            out[i] = -z - math.exp(-z) - math.log(scale)
        else:
            u = 1.0 + xi * z
            if u <= 0.0:
                out[i] = -np.inf
            else:
                lu = math.log(u)
                out[i] = -(1.0 + 1.0 / xi) * lu - math.exp(-lu / xi) - math.log(scale)
    return out


@njit(**_NJIT)
def gev_cdf(x, xi, loc, scale):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        z = (x[i] - loc) / scale
        if abs(xi) < 1e-12:
            out[i] = math.exp(-math.exp(-z))
        else:
            u = 1.0 + xi * z
            if u <= 0.0:
                out[i] = 0.0 if xi > 0.0 else 1.0
            else:
                out[i] = math.exp(-math.exp(-math.log(u) / xi))
    return out


@njit(**_NJIT)
def gev_nll(x, xi, loc, scale):
    acc = 0.0
    for i in range(x.shape[0]):
        z = (x[i] - loc) / scale
        if abs(xi) < 1e-12:
            acc += z + math.exp(-z)
        else:
            u = 1.0 + xi * z
            if u <= 0.0:
                return np.inf
            lu = math.log(u)
            acc += (1.0 + 1.0 / xi) * lu + math.exp(-lu / xi)
    return acc + x.shape[0] * math.log(scale)
