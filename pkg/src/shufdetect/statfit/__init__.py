"""Distribution families, MLE fitting, bootstrap KS, significance tests."""

from ._backend import NUMBA_DISABLED, USING_NUMBA
from .families import (
    FAMILY_INFO,
    Family,
    FamilyInfo,
    FittedDist,
    cdf,
    log_pdf,
    nll,
    pdf,
    sample,
    validate_params,
)
from .gof import GofResult, bootstrap_ks, ks_statistic, replicate_seed
from .hypotests import TestReport, mannwhitney_u, welch_t
from .mle import MIN_FIT_SIZE, fit_mle
from .robust import iqr_filter, quantile

__all__ = [
    "FAMILY_INFO",
    "Family",
    "FamilyInfo",
    "FittedDist",
    "GofResult",
    "MIN_FIT_SIZE",
    "NUMBA_DISABLED",
    "TestReport",
    "USING_NUMBA",
    "bootstrap_ks",
    "cdf",
    "fit_mle",
    "iqr_filter",
    "ks_statistic",
    "log_pdf",
    "mannwhitney_u",
    "nll",
    "pdf",
    "quantile",
    "replicate_seed",
    "sample",
    "validate_params",
    "welch_t",
]
