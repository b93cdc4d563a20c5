"""The eleven continuous distribution families: pdf/cdf/log-pdf and sampling.

Parameterizations follow the usual loc/scale convention (matching what
scipy.stats uses for the same names, except that the extreme-value shape xi
is signed so that xi > 0 gives the heavy right tail).  Burr means Burr Type
XII.  Beta carries its support as derived (loc, scale) parameters; only its
two shape parameters are free when fitting.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParams
from ._backend import kernels


class Family(str, enum.Enum):
    NORMAL = "normal"
    LOGNORMAL = "lognormal"
    STUDENT_T = "studentt"
    EXPONENTIAL = "exponential"
    POWERLAW = "powerlaw"
    GAMMA = "gamma"
    WEIBULL = "weibull"
    BETA = "beta"
    BURR = "burr"
    PARETO = "pareto"
    GEV = "gev"


@dataclass(frozen=True)
class FamilyInfo:
    param_names: tuple[str, ...]
    n_free: int               # free parameters under MLE (tie-break key)
    support: str
    shape_positions: tuple[int, ...]  # indices that must be > 0 besides scale


FAMILY_INFO: dict[Family, FamilyInfo] = {
    Family.NORMAL: FamilyInfo(("mu", "sigma"), 2, "all reals", (1,)),
    Family.LOGNORMAL: FamilyInfo(("s", "loc", "scale"), 3, "x > loc", (0,)),
    Family.STUDENT_T: FamilyInfo(("df", "loc", "scale"), 3, "all reals", (0,)),
    Family.EXPONENTIAL: FamilyInfo(("loc", "scale"), 2, "x >= loc", ()),
    Family.POWERLAW: FamilyInfo(("a", "loc", "scale"), 3, "loc <= x <= loc+scale", (0,)),
    Family.GAMMA: FamilyInfo(("shape", "loc", "scale"), 3, "x > loc", (0,)),
    Family.WEIBULL: FamilyInfo(("c", "loc", "scale"), 3, "x > loc", (0,)),
    Family.BETA: FamilyInfo(("a", "b", "loc", "scale"), 2, "loc < x < loc+scale", (0, 1)),
    Family.BURR: FamilyInfo(("c", "d", "loc", "scale"), 4, "x > loc", (0, 1)),
    Family.PARETO: FamilyInfo(("b", "loc", "scale"), 3, "x >= loc + scale", (0,)),
    Family.GEV: FamilyInfo(("xi", "loc", "scale"), 3, "depends on xi sign", ()),
}


@dataclass(frozen=True)
class FittedDist:
    family: Family
    params: tuple[float, ...]
    nll_at_fit: float = math.nan
    sample_size: int = 0

    def param_dict(self) -> dict[str, float]:
        return dict(zip(FAMILY_INFO[self.family].param_names, self.params))


def validate_params(family: Family, params: tuple[float, ...]) -> None:
    info = FAMILY_INFO[family]
    if len(params) != len(info.param_names):
        raise InvalidParams(
            f"{family.value} takes {len(info.param_names)} parameters "
            f"({', '.join(info.param_names)}), got {len(params)}"
        )
    for v in params:
        if not math.isfinite(v):
            raise InvalidParams(f"{family.value} parameters must be finite: {params}")
    # scale (last parameter by convention; sigma for normal) must be positive
    if params[-1] <= 0:
        raise InvalidParams(f"{family.value} scale must be > 0: {params}")
    for idx in info.shape_positions:
        if params[idx] <= 0:
            raise InvalidParams(
                f"{family.value} parameter {info.param_names[idx]} must be > 0: {params}"
            )


def _as_array(x) -> tuple[np.ndarray, bool]:
    scalar = np.isscalar(x) or (isinstance(x, np.ndarray) and x.ndim == 0)
    arr = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=np.float64)))
    return arr, scalar


def log_pdf(f: FittedDist, x):
    """Log density; -inf outside support. Scalar in, scalar out."""
    validate_params(f.family, f.params)
    arr, scalar = _as_array(x)
    fn = getattr(kernels, f"{f.family.value}_logpdf")
    out = fn(arr, *f.params)
    return float(out[0]) if scalar else out


def pdf(f: FittedDist, x):
    out = log_pdf(f, x)
    return math.exp(out) if isinstance(out, float) else np.exp(out)


def cdf(f: FittedDist, x):
    validate_params(f.family, f.params)
    arr, scalar = _as_array(x)
    fn = getattr(kernels, f"{f.family.value}_cdf")
    out = fn(arr, *f.params)
    return float(out[0]) if scalar else out


def nll(f: FittedDist, x) -> float:
    """Total negative log likelihood of the sample under f."""
    validate_params(f.family, f.params)
    arr, _ = _as_array(x)
    fn = getattr(kernels, f"{f.family.value}_nll")
    return float(fn(arr, *f.params))


def _generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def sample(f: FittedDist, n: int, seed) -> np.ndarray:
    """n i.i.d. draws; deterministic under an integer seed."""
    validate_params(f.family, f.params)
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = _generator(seed)
    fam, p = f.family, f.params
    if fam is Family.NORMAL:
        mu, sigma = p
        return mu + sigma * gen.standard_normal(n)
    if fam is Family.LOGNORMAL:
        s, loc, scale = p
        return loc + scale * np.exp(s * gen.standard_normal(n))
    if fam is Family.STUDENT_T:
        df, loc, scale = p
        return loc + scale * gen.standard_t(df, n)
    if fam is Family.EXPONENTIAL:
        loc, scale = p
        return loc + scale * gen.standard_exponential(n)
    if fam is Family.POWERLAW:
        a, loc, scale = p
        return loc + scale * gen.random(n) ** (1.0 / a)
    if fam is Family.GAMMA:
        shape, loc, scale = p
        return loc + scale * gen.standard_gamma(shape, n)
    if fam is Family.WEIBULL:
        c, loc, scale = p
        return loc + scale * gen.weibull(c, n)
    if fam is Family.BETA:
        a, b, loc, scale = p
        return loc + scale * gen.beta(a, b, n)
    if fam is Family.BURR:
        c, d, loc, scale = p
        u = gen.random(n)
        return loc + scale * np.expm1(-np.log1p(-u) / d) ** (1.0 / c)
    if fam is Family.PARETO:
        b, loc, scale = p
        return loc + scale * (1.0 - gen.random(n)) ** (-1.0 / b)
    if fam is Family.GEV:
        xi, loc, scale = p
        e = -np.log(gen.random(n))  # standard exponential
        if abs(xi) < 1e-12:
            return loc - scale * np.log(e)
        return loc + scale * np.expm1(-xi * np.log(e)) / xi
    raise InvalidParams(f"unknown family {fam!r}")
