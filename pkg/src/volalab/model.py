"""Core model types and filtering.

Two conditional log-variance recursions are covered. The asymmetric
log-GARCH(p, q) drives log sigma_t^2 with sign-gated logs of past squared
returns; no positivity or sign constraints are placed on the coefficients.
The EGARCH(p, l) drives it with past standardized shocks and their absolute
values. Filtering runs the corresponding recursion on observed returns with
data-adaptive initial values and reports log-variances, so paths can be
compared and fed into quasi-likelihoods without exponentiating early.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._kernels import rec
from .errors import (
    DegeneracyError,
    ExplosionError,
    InvalidInputError,
    NotApplicableError,
)

__all__ = [
    "DEFAULT_FLOOR",
    "LogGarchParams",
    "EgarchParams",
    "Series",
    "VolPath",
    "InitPolicy",
    "ArmaRep",
    "filter_log_garch",
    "filter_egarch",
    "arma_representation",
    "lag_poly_roots_outside",
    "egarch_contraction_margin",
]

# Returns smaller than this in absolute value are clamped before taking logs.
DEFAULT_FLOOR = 1e-8


def _check_coeffs(name: str, values: Sequence[float]) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if any(not math.isfinite(v) for v in out):
        raise InvalidInputError(f"{name} contains non-finite entries: {out}")
    return out


@dataclass(frozen=True)
class LogGarchParams:
    """Coefficients (omega, alpha_pos, alpha_neg, beta) of the log-GARCH."""

    omega: float
    alpha_pos: tuple[float, ...] = ()
    alpha_neg: tuple[float, ...] = ()
    beta: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "alpha_pos", _check_coeffs("alpha_pos", self.alpha_pos))
        object.__setattr__(self, "alpha_neg", _check_coeffs("alpha_neg", self.alpha_neg))
        object.__setattr__(self, "beta", _check_coeffs("beta", self.beta))
        if not math.isfinite(self.omega):
            raise InvalidInputError(f"omega must be finite, got {self.omega}")
        if len(self.alpha_pos) != len(self.alpha_neg):
            raise InvalidInputError(
                "alpha_pos and alpha_neg must have equal length, got "
                f"{len(self.alpha_pos)} and {len(self.alpha_neg)}"
            )

    @property
    def q(self) -> int:
        return len(self.alpha_pos)

    @property
    def p(self) -> int:
        return len(self.beta)

    @property
    def num_params(self) -> int:
        return 1 + 2 * self.q + self.p

    @property
    def symmetric(self) -> bool:
        return self.alpha_pos == self.alpha_neg

    def as_vector(self) -> np.ndarray:
        return np.concatenate(
            [[self.omega], self.alpha_pos, self.alpha_neg, self.beta]
        ).astype(np.float64)

    @staticmethod
    def from_vector(vec: np.ndarray, p: int, q: int) -> "LogGarchParams":
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (1 + 2 * q + p,):
            raise InvalidInputError(
                f"expected vector of length {1 + 2 * q + p}, got shape {vec.shape}"
            )
        return LogGarchParams(
            omega=float(vec[0]),
            alpha_pos=tuple(vec[1 : 1 + q]),
            alpha_neg=tuple(vec[1 + q : 1 + 2 * q]),
            beta=tuple(vec[1 + 2 * q :]),
        )


@dataclass(frozen=True)
class EgarchParams:
    """Coefficients (omega, beta, gamma, delta) of the EGARCH."""

    omega: float
    beta: tuple[float, ...] = ()
    gamma: tuple[float, ...] = ()
    delta: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "beta", _check_coeffs("beta", self.beta))
        object.__setattr__(self, "gamma", _check_coeffs("gamma", self.gamma))
        object.__setattr__(self, "delta", _check_coeffs("delta", self.delta))
        if not math.isfinite(self.omega):
            raise InvalidInputError(f"omega must be finite, got {self.omega}")
        if len(self.gamma) != len(self.delta):
            raise InvalidInputError(
                "gamma and delta must have equal length, got "
                f"{len(self.gamma)} and {len(self.delta)}"
            )

    @property
    def p(self) -> int:
        return len(self.beta)

    @property
    def num_lags(self) -> int:
        return len(self.gamma)

    @property
    def num_params(self) -> int:
        return 1 + self.p + 2 * self.num_lags

    def as_vector(self) -> np.ndarray:
        return np.concatenate([[self.omega], self.beta, self.gamma, self.delta]).astype(
            np.float64
        )

    @staticmethod
    def from_vector(vec: np.ndarray, p: int, num_lags: int) -> "EgarchParams":
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (1 + p + 2 * num_lags,):
            raise InvalidInputError(
                f"expected vector of length {1 + p + 2 * num_lags}, got shape {vec.shape}"
            )
        return EgarchParams(
            omega=float(vec[0]),
            beta=tuple(vec[1 : 1 + p]),
            gamma=tuple(vec[1 + p : 1 + p + num_lags]),
            delta=tuple(vec[1 + p + num_lags :]),
        )


@dataclass(frozen=True, eq=False)
class Series:
    """A one-dimensional float series, optionally timestamped."""

    values: np.ndarray
    timestamps: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if v.ndim != 1:
            raise InvalidInputError(f"series must be one-dimensional, got shape {v.shape}")
        if v.size == 0:
            raise InvalidInputError("series is empty")
        if not np.isfinite(v).all():
            bad = int(np.flatnonzero(~np.isfinite(v))[0])
            raise InvalidInputError(f"series has a non-finite value at index {bad}")
        object.__setattr__(self, "values", v)
        if self.timestamps is not None:
            ts = tuple(str(t) for t in self.timestamps)
            if len(ts) != v.size:
                raise InvalidInputError(
                    f"{len(ts)} timestamps for {v.size} values"
                )
            object.__setattr__(self, "timestamps", ts)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True, eq=False)
class VolPath:
    """A log-variance path, tagged with how it was produced."""

    log_sigma2: np.ndarray
    origin: str  # "generative" or "filtered"
    warnings: tuple[str, ...] = ()

    @property
    def sigma2(self) -> np.ndarray:
        return np.exp(self.log_sigma2)


@dataclass(frozen=True)
class InitPolicy:
    """Pre-sample values for filtering.

    The default mode seeds the q pre-sample squared returns with the sample
    variance of the estimation window and the p pre-sample log-variances
    with its log. Fixed mode uses the supplied scalars instead. Pre-sample
    squared returns carry no sign, so their asymmetry terms use the
    averaged coefficient (alpha_pos + alpha_neg) / 2.
    """

    mode: str = "sample-variance"
    eps2: Optional[float] = None
    log_sigma2: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ("sample-variance", "fixed"):
            raise InvalidInputError(f"unknown init mode {self.mode!r}")
        if self.mode == "fixed":
            if self.eps2 is None or self.log_sigma2 is None:
                raise InvalidInputError("fixed init needs both eps2 and log_sigma2")
            if not self.eps2 > 0:
                raise InvalidInputError(f"pre-sample eps2 must be positive, got {self.eps2}")

    def resolve(self, values: np.ndarray) -> tuple[float, float]:
        """Return (pre-sample eps^2, pre-sample log sigma^2)."""
        if self.mode == "fixed":
            return float(self.eps2), float(self.log_sigma2)
        v = float(np.mean(values * values))
        if v <= 0.0:
            v = DEFAULT_FLOOR * DEFAULT_FLOOR
        return v, math.log(v)


def _series_values(series) -> np.ndarray:
    if isinstance(series, Series):
        return series.values
    return Series(np.asarray(series)).values


def _raise_on_bad_step(status: int, ls: np.ndarray, what: str):
    if status < 0:
        return
    if ls[status] > 0:
        raise ExplosionError(
            f"{what} exceeded the representable range at step {status} "
            f"(log sigma^2 = {ls[status]:.3g})",
            step=status,
        )
    raise DegeneracyError(
        f"{what} underflowed to zero variance at step {status} "
        f"(log sigma^2 = {ls[status]:.3g})",
        step=status,
    )


def filter_log_garch(
    params: LogGarchParams,
    series,
    init: Optional[InitPolicy] = None,
    floor: float = DEFAULT_FLOOR,
) -> VolPath:
    """Run the log-GARCH recursion on observed returns.

    Absolute returns are clamped at ``floor`` before the log is taken; exact
    zeros additionally lose their sign and enter through the averaged
    asymmetry coefficient.
    """
    values = _series_values(series)
    if not floor > 0.0:
        raise InvalidInputError(f"floor must be positive, got {floor}")
    init = init or InitPolicy()
    pre_eps2, pre_ls_val = init.resolve(values)
    q, p, n = params.q, params.p, values.size

    le2 = np.empty(q + n)
    code = np.empty(q + n, dtype=np.uint8)
    le2[:q] = math.log(max(pre_eps2, floor * floor))
    code[:q] = 2
    np.log(np.maximum(np.abs(values), floor), out=le2[q:])
    le2[q:] *= 2.0
    code[q:] = np.where(values > 0, 1, np.where(values < 0, 0, 2)).astype(np.uint8)

    pre_ls = np.full(p, pre_ls_val)
    ls = np.empty(n)
    status = rec.loggarch_filter(
        params.omega,
        np.asarray(params.alpha_pos),
        np.asarray(params.alpha_neg),
        np.asarray(params.beta),
        le2,
        code,
        pre_ls,
        ls,
    )
    _raise_on_bad_step(status, ls, "log-GARCH filter")
    return VolPath(log_sigma2=ls, origin="filtered")


def filter_egarch(
    params: EgarchParams,
    series,
    init: Optional[InitPolicy] = None,
) -> tuple[VolPath, np.ndarray]:
    """Run the EGARCH recursion on observed returns.

    Returns the filtered path and the standardized residuals. Pre-sample
    residuals are zero; pre-sample log-variances follow ``init``. When the
    first-order empirical contraction check fails the filter still runs but
    the path carries a warning, since the filtered sequence may then fail
    to forget its initialization.
    """
    values = _series_values(series)
    init = init or InitPolicy()
    _, pre_ls_val = init.resolve(values)
    p, n = params.p, values.size

    pre_ls = np.full(p, pre_ls_val)
    ls = np.empty(n)
    eta = np.empty(n)
    status = rec.egarch_filter(
        params.omega,
        np.asarray(params.beta),
        np.asarray(params.gamma),
        np.asarray(params.delta),
        values,
        pre_ls,
        ls,
        eta,
    )
    _raise_on_bad_step(status, ls, "EGARCH filter")

    notes: tuple[str, ...] = ()
    if p == 1 and params.num_lags == 1:
        try:
            margin = egarch_contraction_margin(params, values)
        except NotApplicableError:
            margin = None
        if margin is not None and margin >= 0.0:
            msg = (
                "EGARCH filter contraction check failed "
                f"(margin {margin:.4g} >= 0); the filtered path may not "
                "forget its initial values"
            )
            warnings.warn(msg)
            notes = (msg,)
    return VolPath(log_sigma2=ls, origin="filtered", warnings=notes), eta


@dataclass(frozen=True)
class ArmaRep:
    """ARMA form of the symmetric log-GARCH in log sigma_t^2."""

    ar: tuple[float, ...]
    ma: tuple[float, ...]
    intercept: float


def arma_representation(params: LogGarchParams) -> ArmaRep:
    """ARMA coefficients of log sigma_t^2 driven by log eta_t^2.

    Only defined in the symmetric case: the AR polynomial is
    1 - sum (alpha_i + beta_i) z^i over i = 1..max(p, q) with zero padding,
    the MA part is the alpha block, the intercept is omega.
    """
    if not params.symmetric:
        raise NotApplicableError(
            "the ARMA form needs alpha_pos == alpha_neg",
            failed_condition="symmetry",
        )
    q, p = params.q, params.p
    r = max(p, q)
    alpha = params.alpha_pos
    ar = tuple(
        (alpha[i] if i < q else 0.0) + (params.beta[i] if i < p else 0.0)
        for i in range(r)
    )
    return ArmaRep(ar=ar, ma=alpha, intercept=params.omega)


def lag_poly_roots_outside(beta: Sequence[float], tol: float = 1e-10) -> bool:
    """True iff every root of 1 - sum beta_j z^j lies outside the unit circle.

    Boundary roots (modulus within ``tol`` of one) count as failing.
    """
    b = _check_coeffs("beta", beta)
    coeffs = np.array([1.0] + [-x for x in b])[::-1]
    coeffs = np.trim_zeros(coeffs, "f")
    if coeffs.size <= 1:
        return True
    roots = np.roots(coeffs)
    if roots.size == 0:
        return True
    return bool(np.min(np.abs(roots)) > 1.0 + tol)


def egarch_contraction_margin(params: EgarchParams, series) -> float:
    """Empirical contraction statistic of the first-order EGARCH filter.

    Mean over observations of log max{beta, u_t - beta} where u_t bounds the
    derivative of the filter map at the stationary floor of log sigma^2.
    Negative means the filter forgets its initialization at a geometric
    rate. Defined for p = 1, one shock lag, and beta in (0, 1).
    """
    if params.p != 1 or params.num_lags != 1:
        raise NotApplicableError(
            "contraction margin is defined for one beta lag and one shock lag",
            failed_condition="p == 1 and num_lags == 1",
        )
    beta = params.beta[0]
    if not 0.0 < beta < 1.0:
        raise NotApplicableError(
            f"contraction margin needs beta in (0, 1), got {beta}",
            failed_condition="0 < beta < 1",
        )
    values = _series_values(series)
    gamma, delta = params.gamma[0], params.delta[0]
    # Capped exponent: extreme omega yields an infinite (non-contracting)
    # margin rather than an overflow error.
    scale = math.exp(min(-0.5 * params.omega / (1.0 - beta), 700.0))
    with np.errstate(over="ignore"):
        u = 0.5 * (gamma * values + delta * np.abs(values)) * scale
        return float(np.mean(np.log(np.maximum(beta, u - beta))))
