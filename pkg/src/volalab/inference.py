"""Hypothesis tests and model comparison on fitted results.

The symmetry test is a Wald test on the fitted coefficient vector: equal
positive and negative response coefficients for the log-GARCH, zero signed
shock coefficients for the EGARCH. Model comparison ranks fits of the same
series by their quasi-log-likelihood, refusing to compare fits whose
likelihood windows differ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .errors import (
    CovarianceUnavailableError,
    DegeneracyError,
    InvalidInputError,
    NotApplicableError,
)
from .estimate import FitResult
from .model import LogGarchParams

__all__ = ["WaldReport", "ComparisonReport", "wald_symmetry", "compare_models"]


@dataclass(frozen=True)
class WaldReport:
    statistic: float
    dof: int
    p_value: float

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "dof": self.dof,
            "p_value": self.p_value,
        }


@dataclass(frozen=True)
class ComparisonReport:
    family_a: str
    family_b: str
    loglik_a: float
    loglik_b: float
    winner: str
    margin: float

    def to_dict(self) -> dict:
        return {
            "family_a": self.family_a,
            "family_b": self.family_b,
            "loglik_a": self.loglik_a,
            "loglik_b": self.loglik_b,
            "winner": self.winner,
            "margin": self.margin,
        }


def _restriction(fit: FitResult) -> np.ndarray:
    params = fit.params
    d = len(fit.names)
    if isinstance(params, LogGarchParams):
        q = params.q
        if q == 0:
            raise NotApplicableError(
                "no asymmetry coefficients to test", failed_condition="q >= 1"
            )
        r = np.zeros((q, d))
        for i in range(q):
            r[i, 1 + i] = 1.0
            r[i, 1 + q + i] = -1.0
        return r
    ell = params.num_lags
    if ell == 0:
        raise NotApplicableError(
            "no signed shock coefficients to test", failed_condition="num_lags >= 1"
        )
    p = params.p
    r = np.zeros((ell, d))
    for k in range(ell):
        r[k, 1 + p + k] = 1.0
    return r


def wald_symmetry(fit: FitResult) -> WaldReport:
    """Wald test of a symmetric response to positive and negative shocks."""
    if fit.acov is None:
        raise CovarianceUnavailableError(
            "fit carries no covariance; the Wald statistic is undefined"
        )
    r = _restriction(fit)
    theta = fit.params.as_vector()
    contrast = r @ theta
    middle = r @ fit.acov @ r.T
    try:
        solved = np.linalg.solve(middle, contrast)
    except np.linalg.LinAlgError as exc:
        raise DegeneracyError(f"restricted covariance is singular: {exc}") from None
    stat = float(contrast @ solved)
    if not np.isfinite(stat) or stat < 0:
        raise DegeneracyError(f"Wald statistic is not a valid quadratic form: {stat}")
    dof = r.shape[0]
    return WaldReport(statistic=stat, dof=dof, p_value=float(chi2.sf(stat, dof)))


def compare_models(fit_a: FitResult, fit_b: FitResult) -> ComparisonReport:
    """Rank two fits of the same series by quasi-log-likelihood.

    Both fits must share the sample and the likelihood window; otherwise the
    objectives average over different terms and the comparison is
    meaningless.
    """
    if fit_a.n != fit_b.n or fit_a.r0 != fit_b.r0:
        raise InvalidInputError(
            "likelihood windows differ: "
            f"(n={fit_a.n}, r0={fit_a.r0}) vs (n={fit_b.n}, r0={fit_b.r0})"
        )
    if not np.array_equal(fit_a.eps, fit_b.eps):
        raise InvalidInputError("fits were computed on different series")
    if fit_a.loglik > fit_b.loglik:
        winner = fit_a.family
    elif fit_b.loglik > fit_a.loglik:
        winner = fit_b.family
    else:
        winner = "tie"
    return ComparisonReport(
        family_a=fit_a.family,
        family_b=fit_b.family,
        loglik_a=fit_a.loglik,
        loglik_b=fit_b.loglik,
        winner=winner,
        margin=abs(fit_a.loglik - fit_b.loglik),
    )
