"""Maximum-likelihood fitting for the eleven families.

Strategy per family:

* closed form where exact (normal; exponential with boundary location;
  lognormal shape/scale given the location),
* a one-dimensional profile over the location where the remaining parameters
  have closed-form or boundary solutions (lognormal, pareto, powerlaw),
* otherwise Nelder-Mead on the negative log likelihood with positive
  parameters log-transformed, three restarts from moment-based and perturbed
  initializers, simplex tolerance 1e-8 and at most 2000 iterations each.

For positive-support families the location is fitted but constrained to
loc <= min(xs) - 1e-9 via the reparameterization loc = bound - exp(g); the
small gap keeps single-point likelihood spikes out of reach.  Beta's support
is fixed to the data range expanded by 0.1% (or a caller-supplied interval),
leaving only the two shape parameters free.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize

from ..errors import InsufficientData, OptimizationFailed, SupportViolation
from ._backend import kernels
from .families import Family, FittedDist, validate_params

_LOC_GAP = 1e-9
_NM_OPTIONS = {"xatol": 1e-8, "fatol": 1e-8, "maxiter": 2000, "maxfev": 4000}
MIN_FIT_SIZE = 8


def _spread(xs: np.ndarray) -> float:
    s = float(np.std(xs))
    if s > 0:
        return s
    return max(1e-8 * max(1.0, abs(float(np.mean(xs)))), 1e-12)


_NLL_CAP = 1e300


def _nelder_mead(obj, inits: list[np.ndarray]) -> tuple[np.ndarray, float]:
    """Best converged restart; OptimizationFailed when none converges."""
    def capped(vec):
        # keep the simplex free of infinities so NM's own arithmetic stays clean
        try:
            v = obj(vec)
        except (OverflowError, ValueError):
            return _NLL_CAP
        return v if v < _NLL_CAP else _NLL_CAP

    best_x, best_f = None, math.inf
    converged = False
    for x0 in inits:
        res = minimize(capped, np.asarray(x0, dtype=float), method="Nelder-Mead",
                       options=_NM_OPTIONS)
        if not math.isfinite(res.fun):
            continue
        if res.success:
            converged = True
            if res.fun < best_f:
                best_x, best_f = res.x, float(res.fun)
    if not converged or best_x is None:
        raise OptimizationFailed("Nelder-Mead did not converge in any restart")
    return best_x, best_f


# --- closed forms -----------------------------------------------------------

def _fit_normal(xs: np.ndarray) -> FittedDist:
    mu = float(np.mean(xs))
    sigma = float(np.sqrt(np.mean((xs - mu) ** 2)))
    if sigma <= 0:
        raise OptimizationFailed("zero variance: normal MLE degenerate")
    return FittedDist(Family.NORMAL, (mu, sigma),
                      nll_at_fit=kernels.normal_nll(xs, mu, sigma),
                      sample_size=xs.size)


def _fit_exponential(xs: np.ndarray) -> FittedDist:
    loc = float(np.min(xs)) - _LOC_GAP
    scale = float(np.mean(xs)) - loc
    return FittedDist(Family.EXPONENTIAL, (loc, scale),
                      nll_at_fit=kernels.exponential_nll(xs, loc, scale),
                      sample_size=xs.size)


# --- 1-D location profiles -----------------------------------------------------

def _profile_fit(xs, family, inner, gap_factors=(0.25, 1.0, 0.01), inits=None):
    """NM over g with loc = min - 1e-9 - exp(g); ``inner`` closes the rest."""
    bound = float(np.min(xs)) - _LOC_GAP
    spread = _spread(xs)

    def obj(vec):
        loc = bound - math.exp(vec[0])
        params = inner(loc)
        if params is None:
            return math.inf
        return getattr(kernels, f"{family.value}_nll")(xs, *params)

    if inits is None:
        inits = [np.array([math.log(f * spread)]) for f in gap_factors]
    best, best_f = _nelder_mead(obj, inits)
    loc = bound - math.exp(best[0])
    params = inner(loc)
    return FittedDist(family, tuple(float(v) for v in params),
                      nll_at_fit=best_f, sample_size=xs.size)


def _fit_lognormal(xs: np.ndarray, inits=None) -> FittedDist:
    def inner(loc):
        logs = np.log(xs - loc)
        mu = float(np.mean(logs))
        s = float(np.sqrt(np.mean((logs - mu) ** 2)))
        if s <= 1e-12:
            return None
        return (s, loc, math.exp(mu))
    return _profile_fit(xs, Family.LOGNORMAL, inner, inits=inits)


def _fit_pareto(xs: np.ndarray, inits=None) -> FittedDist:
    def inner(loc):
        y = xs - loc
        scale = float(np.min(y))
        logs = np.log(y / scale)
        total = float(np.sum(logs))
        if total <= 0:
            return None
        return (xs.size / total, loc, scale)
    return _profile_fit(xs, Family.PARETO, inner, gap_factors=(0.5, 2.0, 0.05), inits=inits)


def _fit_powerlaw(xs: np.ndarray, inits=None) -> FittedDist:
    def inner(loc):
        scale = float(np.max(xs)) - loc
        logs = np.log((xs - loc) / scale)
        total = float(np.sum(logs))
        if total >= 0:
            return None
        return (-xs.size / total, loc, scale)
    return _profile_fit(xs, Family.POWERLAW, inner, inits=inits)


# --- full Nelder-Mead families -----------------------------------------------

def _loc_scale_moments(xs, loc):
    m = float(np.mean(xs)) - loc
    s = _spread(xs)
    return m, s


def _fit_gamma(xs: np.ndarray, inits=None) -> FittedDist:
    bound = float(np.min(xs)) - _LOC_GAP
    spread = _spread(xs)

    def obj(vec):
        shape = math.exp(vec[0])
        loc = bound - math.exp(vec[1])
        scale = math.exp(vec[2])
        return kernels.gamma_nll(xs, shape, loc, scale)

    if inits is not None:
        best, best_f = _nelder_mead(obj, inits)
        params = (math.exp(best[0]), bound - math.exp(best[1]), math.exp(best[2]))
        return FittedDist(Family.GAMMA, params, nll_at_fit=best_f, sample_size=xs.size)
    inits = []
    for gap_f in (0.25, 1.5, 0.01):
        gap = gap_f * spread
        loc0 = bound - gap
        m, s = _loc_scale_moments(xs, loc0)
        shape0 = max((m / s) ** 2, 1e-2)
        scale0 = max(s * s / m, 1e-12)
        inits.append(np.array([math.log(shape0), math.log(gap), math.log(scale0)]))
    best, best_f = _nelder_mead(obj, inits)
    params = (math.exp(best[0]), bound - math.exp(best[1]), math.exp(best[2]))
    return FittedDist(Family.GAMMA, params, nll_at_fit=best_f, sample_size=xs.size)


def _fit_weibull(xs: np.ndarray, inits=None) -> FittedDist:
    bound = float(np.min(xs)) - _LOC_GAP
    spread = _spread(xs)

    def obj(vec):
        c = math.exp(vec[0])
        loc = bound - math.exp(vec[1])
        scale = math.exp(vec[2])
        return kernels.weibull_nll(xs, c, loc, scale)

    if inits is not None:
        best, best_f = _nelder_mead(obj, inits)
        params = (math.exp(best[0]), bound - math.exp(best[1]), math.exp(best[2]))
        return FittedDist(Family.WEIBULL, params, nll_at_fit=best_f, sample_size=xs.size)
    inits = []
    for gap_f in (0.25, 1.5, 0.01):
        gap = gap_f * spread
        loc0 = bound - gap
        m, s = _loc_scale_moments(xs, loc0)
        c0 = min(max((s / m) ** -1.086, 0.2), 50.0)
        scale0 = m / math.gamma(1.0 + 1.0 / c0)
        inits.append(np.array([math.log(c0), math.log(gap), math.log(scale0)]))
    best, best_f = _nelder_mead(obj, inits)
    params = (math.exp(best[0]), bound - math.exp(best[1]), math.exp(best[2]))
    return FittedDist(Family.WEIBULL, params, nll_at_fit=best_f, sample_size=xs.size)


def _fit_studentt(xs: np.ndarray, inits=None) -> FittedDist:
    def obj(vec):
        df = math.exp(vec[0])
        scale = math.exp(vec[2])
        return kernels.studentt_nll(xs, df, vec[1], scale)

    if inits is not None:
        best, best_f = _nelder_mead(obj, inits)
        params = (math.exp(best[0]), float(best[1]), math.exp(best[2]))
        return FittedDist(Family.STUDENT_T, params, nll_at_fit=best_f, sample_size=xs.size)

    med = float(np.median(xs))
    s = _spread(xs)
    m2 = float(np.mean((xs - np.mean(xs)) ** 2))
    m4 = float(np.mean((xs - np.mean(xs)) ** 4))
    excess = m4 / (m2 * m2) - 3.0 if m2 > 0 else 0.0
    df0 = 4.0 + 6.0 / excess if excess > 0.05 else 20.0
    df0 = min(max(df0, 2.1), 200.0)
    inits = []
    for df_f, s_f in ((1.0, 1.0), (3.0, 0.7), (0.4, 1.5)):
        df_i = min(max(df0 * df_f, 2.05), 500.0)
        scale_i = s * s_f * math.sqrt(max(df_i - 2.0, 0.2) / df_i)
        inits.append(np.array([math.log(df_i), med, math.log(scale_i)]))
    best, best_f = _nelder_mead(obj, inits)
    params = (math.exp(best[0]), float(best[1]), math.exp(best[2]))
    return FittedDist(Family.STUDENT_T, params, nll_at_fit=best_f, sample_size=xs.size)


def _fit_beta(xs: np.ndarray, support: tuple[float, float] | None,
              inits=None) -> FittedDist:
    lo_data, hi_data = float(np.min(xs)), float(np.max(xs))
    if support is None:
        pad = 0.001 * (hi_data - lo_data)
        if pad <= 0:
            raise OptimizationFailed("zero range: beta support degenerate")
        lo, hi = lo_data - pad, hi_data + pad
    else:
        lo, hi = float(support[0]), float(support[1])
        if hi <= lo:
            raise SupportViolation(f"invalid beta support ({lo}, {hi})")
        if lo_data < lo or hi_data > hi:
            raise SupportViolation(
                f"data range [{lo_data}, {hi_data}] outside beta support [{lo}, {hi}]"
            )
    scale = hi - lo
    y = (xs - lo) / scale
    ym = float(np.mean(y))
    yv = float(np.var(y))
    common = max(ym * (1.0 - ym) / max(yv, 1e-12) - 1.0, 0.1)
    a0 = max(ym * common, 1e-3)
    b0 = max((1.0 - ym) * common, 1e-3)

    def obj(vec):
        return kernels.beta_nll(xs, math.exp(vec[0]), math.exp(vec[1]), lo, scale)

    if inits is None:
        inits = [np.array([math.log(a0 * fa), math.log(b0 * fb)])
                 for fa, fb in ((1.0, 1.0), (2.5, 2.5), (0.4, 0.4))]
    best, best_f = _nelder_mead(obj, inits)
    params = (math.exp(best[0]), math.exp(best[1]), lo, scale)
    return FittedDist(Family.BETA, params, nll_at_fit=best_f, sample_size=xs.size)


def _fit_burr(xs: np.ndarray, inits=None) -> FittedDist:
    bound = float(np.min(xs)) - _LOC_GAP
    spread = _spread(xs)

    def obj(vec):
        c = math.exp(vec[0])
        d = math.exp(vec[1])
        loc = bound - math.exp(vec[2])
        scale = math.exp(vec[3])
        return kernels.burr_nll(xs, c, d, loc, scale)

    if inits is not None:
        best, best_f = _nelder_mead(obj, inits)
        params = (math.exp(best[0]), math.exp(best[1]), bound - math.exp(best[2]),
                  math.exp(best[3]))
        return FittedDist(Family.BURR, params, nll_at_fit=best_f, sample_size=xs.size)

    inits = []
    for (c0, d0), gap_f in (((2.0, 1.0), 0.25), ((1.0, 2.0), 1.0), ((4.0, 0.6), 0.02)):
        gap = gap_f * spread
        loc0 = bound - gap
        med = float(np.median(xs)) - loc0
        scale0 = max(med / max(2.0 ** (1.0 / d0) - 1.0, 1e-6) ** (1.0 / c0), 1e-9)
        inits.append(np.array([math.log(c0), math.log(d0), math.log(gap),
                               math.log(scale0)]))
    best, best_f = _nelder_mead(obj, inits)
    params = (math.exp(best[0]), math.exp(best[1]), bound - math.exp(best[2]),
              math.exp(best[3]))
    return FittedDist(Family.BURR, params, nll_at_fit=best_f, sample_size=xs.size)


def _fit_gev(xs: np.ndarray, inits=None) -> FittedDist:
    def obj(vec):
        scale = math.exp(vec[2])
        return kernels.gev_nll(xs, vec[0], vec[1], scale)

    if inits is not None:
        best, best_f = _nelder_mead(obj, inits)
        params = (float(best[0]), float(best[1]), math.exp(best[2]))
        return FittedDist(Family.GEV, params, nll_at_fit=best_f, sample_size=xs.size)

    s = _spread(xs)
    scale0 = s * math.sqrt(6.0) / math.pi
    loc0 = float(np.mean(xs)) - 0.57721566 * scale0
    inits = [np.array([xi0, loc0, math.log(scale0)]) for xi0 in (0.1, -0.1, 0.4)]
    best, best_f = _nelder_mead(obj, inits)
    params = (float(best[0]), float(best[1]), math.exp(best[2]))
    return FittedDist(Family.GEV, params, nll_at_fit=best_f, sample_size=xs.size)


_FITTERS = {
    Family.NORMAL: _fit_normal,
    Family.LOGNORMAL: _fit_lognormal,
    Family.STUDENT_T: _fit_studentt,
    Family.EXPONENTIAL: _fit_exponential,
    Family.POWERLAW: _fit_powerlaw,
    Family.GAMMA: _fit_gamma,
    Family.WEIBULL: _fit_weibull,
    Family.BURR: _fit_burr,
    Family.PARETO: _fit_pareto,
    Family.GEV: _fit_gev,
}


def _warm_inits(family: Family, params: tuple[float, ...],
                xs: np.ndarray) -> list[np.ndarray] | None:
    """Optimizer start vector matching each family's transform, from known
    parameters (used to warm-start bootstrap replicate refits)."""
    bound = float(np.min(xs)) - _LOC_GAP

    def gap(loc):
        return math.log(max(bound - loc, 1e-12))

    if family is Family.LOGNORMAL:
        return [np.array([gap(params[1])])]
    if family is Family.PARETO:
        return [np.array([gap(params[1])])]
    if family is Family.POWERLAW:
        return [np.array([gap(params[1])])]
    if family is Family.GAMMA:
        return [np.array([math.log(params[0]), gap(params[1]), math.log(params[2])])]
    if family is Family.WEIBULL:
        return [np.array([math.log(params[0]), gap(params[1]), math.log(params[2])])]
    if family is Family.STUDENT_T:
        return [np.array([math.log(params[0]), params[1], math.log(params[2])])]
    if family is Family.BURR:
        return [np.array([math.log(params[0]), math.log(params[1]), gap(params[2]),
                          math.log(params[3])])]
    if family is Family.GEV:
        return [np.array([params[0], params[1], math.log(params[2])])]
    if family is Family.BETA:
        return [np.array([math.log(params[0]), math.log(params[1])])]
    return None  # closed-form families need no start


def fit_mle(family: Family, xs, support: tuple[float, float] | None = None,
            init: FittedDist | None = None) -> FittedDist:
    """Fit ``family`` to the sample by maximum likelihood.

    ``support`` applies to Beta only and pins its interval instead of the
    default data-derived one.  ``init`` warm-starts the optimizer at known
    parameters (the bootstrap passes the replicate-generating fit), replacing
    the moment-based restarts.
    """
    arr = np.ascontiguousarray(np.asarray(xs, dtype=np.float64)).ravel()
    if arr.size < MIN_FIT_SIZE:
        raise InsufficientData(f"need at least {MIN_FIT_SIZE} observations, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise SupportViolation("observations must be finite")
    if init is not None and init.family is family:
        warm = _warm_inits(family, init.params, arr)
        if warm is not None:
            if family is Family.BETA:
                fitted = _fit_beta(arr, support, inits=warm)
            else:
                fitted = _FITTERS[family](arr, inits=warm)
            validate_params(fitted.family, fitted.params)
            return fitted
    if family is Family.BETA:
        fitted = _fit_beta(arr, support)
    else:
        fitted = _FITTERS[family](arr)
    validate_params(fitted.family, fitted.params)
    return fitted
