"""Replicated simulate-then-fit studies.

Each replication draws its innovations from a counter-based stream indexed
by the replication number, so results are identical whatever the worker
count or scheduling order. Fits that fail are recorded, not silently
dropped, and every aggregate reports how many replications it rests on.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.stats import norm

from .errors import (
    CovarianceUnavailableError,
    DegeneracyError,
    EstimationError,
    ExplosionError,
    InvalidInputError,
    NotApplicableError,
)
from .estimate import FitOptions, fit_egarch, fit_log_garch, param_names
from .inference import compare_models, wald_symmetry
from .innovations import InnovationSpec, normal
from .model import EgarchParams, LogGarchParams
from .simulate import SimConfig, simulate_egarch, simulate_log_garch

__all__ = ["StudyResult", "run_replications"]

Params = Union[LogGarchParams, EgarchParams]


def _one_rep(args):
    (rep, truth, dist, n, burn_in, seed, fit_both, options, do_wald) = args
    config = SimConfig(n=n, burn_in=burn_in, seed=seed, substream=rep)
    try:
        if isinstance(truth, LogGarchParams):
            series, _ = simulate_log_garch(truth, dist, config)
            fit = fit_log_garch(series, truth.p, truth.q, options)
            alt = (
                fit_egarch(series, max(truth.p, 1), max(truth.q, 1), options)
                if fit_both
                else None
            )
        else:
            series, _ = simulate_egarch(truth, dist, config)
            fit = fit_egarch(series, truth.p, truth.num_lags, options)
            alt = (
                fit_log_garch(series, max(truth.p, 1), max(truth.num_lags, 1), options)
                if fit_both
                else None
            )
    except (EstimationError, ExplosionError, DegeneracyError, InvalidInputError) as exc:
        return {"rep": rep, "error": f"{type(exc).__name__}: {exc}"}
    out = {
        "rep": rep,
        "estimate": fit.params.as_vector(),
        "se": fit.se,
        "loglik": fit.loglik,
        "converged": fit.converged,
    }
    if do_wald:
        try:
            out["wald_p"] = wald_symmetry(fit).p_value
        except (CovarianceUnavailableError, DegeneracyError, NotApplicableError):
            out["wald_p"] = None
    if alt is not None:
        out["alt_loglik"] = alt.loglik
        out["winner"] = compare_models(fit, alt).winner
    return out


@dataclass(frozen=True, eq=False)
class StudyResult:
    """Per-replication records plus aggregate views of a study."""

    family: str
    names: tuple[str, ...]
    truth: np.ndarray
    n: int
    reps: int
    estimates: np.ndarray  # (reps, d), nan rows for failures
    se: np.ndarray  # (reps, d), nan where unavailable
    loglik: np.ndarray
    alt_loglik: np.ndarray
    wald_p: np.ndarray
    winners: tuple[Optional[str], ...]
    converged: np.ndarray
    failures: tuple[tuple[int, str], ...]

    @property
    def ok(self) -> np.ndarray:
        return ~np.isnan(self.estimates[:, 0])

    def mean_estimate(self) -> np.ndarray:
        return self.estimates[self.ok].mean(axis=0)

    def bias(self) -> np.ndarray:
        return self.mean_estimate() - self.truth

    def rmse(self) -> np.ndarray:
        return np.sqrt(((self.estimates[self.ok] - self.truth) ** 2).mean(axis=0))

    def sd_estimate(self) -> np.ndarray:
        return self.estimates[self.ok].std(axis=0, ddof=1)

    def mean_se(self) -> np.ndarray:
        have = self.ok & ~np.isnan(self.se[:, 0])
        if not have.any():
            return np.full(self.truth.size, np.nan)
        return self.se[have].mean(axis=0)

    def coverage(self, level: float = 0.95) -> np.ndarray:
        """Per-component fraction of intervals estimate +- z * se covering
        the truth, over replications where a standard error exists."""
        if not 0 < level < 1:
            raise InvalidInputError(f"level must be in (0, 1), got {level}")
        z = float(norm.ppf(0.5 + level / 2.0))
        have = self.ok & ~np.isnan(self.se[:, 0])
        if not have.any():
            return np.full(self.truth.size, np.nan)
        est, se = self.estimates[have], self.se[have]
        hit = np.abs(est - self.truth) <= z * se
        return hit.mean(axis=0)

    def rejection_rate(self, alpha: float = 0.05) -> float:
        """Fraction of symmetry-test p-values below alpha."""
        p = self.wald_p[~np.isnan(self.wald_p)]
        if p.size == 0:
            raise NotApplicableError(
                "no symmetry test results recorded", failed_condition="wald computed"
            )
        return float((p < alpha).mean())

    def winner_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for w in self.winners:
            if w is not None:
                out[w] = out.get(w, 0) + 1
        return out

    def summary(self) -> dict:
        out = {
            "family": self.family,
            "n": self.n,
            "reps": self.reps,
            "succeeded": int(self.ok.sum()),
            "failed": len(self.failures),
            "truth": dict(zip(self.names, self.truth.tolist())),
            "mean_estimate": dict(zip(self.names, self.mean_estimate().tolist())),
            "bias": dict(zip(self.names, self.bias().tolist())),
            "rmse": dict(zip(self.names, self.rmse().tolist())),
            "mean_se": dict(zip(self.names, self.mean_se().tolist())),
            "coverage_95": dict(zip(self.names, self.coverage(0.95).tolist())),
        }
        if not np.isnan(self.wald_p).all():
            out["wald_rejection_5pct"] = self.rejection_rate(0.05)
        counts = self.winner_counts()
        if counts:
            out["winner_counts"] = counts
        return out


def run_replications(
    truth: Params,
    dist: Optional[InnovationSpec] = None,
    *,
    n: int = 3344,
    reps: int = 100,
    seed: int = 0,
    burn_in: int = 1000,
    jobs: int = 1,
    fit_both: bool = False,
    wald: bool = True,
    options: Optional[FitOptions] = None,
) -> StudyResult:
    """Simulate ``reps`` series from ``truth`` and refit each one.

    ``fit_both`` also fits the rival family to every series and records
    which one the quasi-likelihood prefers. ``jobs`` > 1 spreads
    replications over worker processes without changing any number.
    """
    if reps < 1:
        raise InvalidInputError(f"reps must be >= 1, got {reps}")
    if jobs < 1:
        raise InvalidInputError(f"jobs must be >= 1, got {jobs}")
    dist = dist if dist is not None else normal()
    options = options if options is not None else FitOptions()
    family = "log-garch" if isinstance(truth, LogGarchParams) else "egarch"
    names = tuple(param_names(truth))
    d = truth.num_params

    args = [
        (rep, truth, dist, n, burn_in, seed, fit_both, options, wald)
        for rep in range(reps)
    ]
    if jobs == 1:
        records = [_one_rep(a) for a in args]
    else:
        chunk = max(1, reps // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_one_rep, args, chunksize=chunk))

    estimates = np.full((reps, d), np.nan)
    se = np.full((reps, d), np.nan)
    loglik = np.full(reps, np.nan)
    alt_loglik = np.full(reps, np.nan)
    wald_p = np.full(reps, np.nan)
    winners: list[Optional[str]] = [None] * reps
    converged = np.zeros(reps, dtype=bool)
    failures: list[tuple[int, str]] = []

    for rec_ in records:
        r = rec_["rep"]
        if "error" in rec_:
            failures.append((r, rec_["error"]))
            continue
        estimates[r] = rec_["estimate"]
        if rec_["se"] is not None:
            se[r] = rec_["se"]
        loglik[r] = rec_["loglik"]
        converged[r] = rec_["converged"]
        if rec_.get("wald_p") is not None:
            wald_p[r] = rec_["wald_p"]
        if "winner" in rec_:
            winners[r] = rec_["winner"]
            alt_loglik[r] = rec_["alt_loglik"]

    if not (~np.isnan(estimates[:, 0])).any():
        first = failures[0][1] if failures else "unknown"
        raise EstimationError(f"every replication failed; first failure: {first}")

    return StudyResult(
        family=family,
        names=names,
        truth=truth.as_vector(),
        n=n,
        reps=reps,
        estimates=estimates,
        se=se,
        loglik=loglik,
        alt_loglik=alt_loglik,
        wald_p=wald_p,
        winners=tuple(winners),
        converged=converged,
        failures=tuple(failures),
    )
