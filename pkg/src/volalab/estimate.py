"""Quasi-maximum likelihood estimation.

Both models are fitted by minimizing the Gaussian quasi-likelihood
objective n^{-1} sum_{t>r0} [eps_t^2 / sigma_t^2(theta) + log sigma_t^2(theta)]
over filtered volatilities, with the first r0 = max lag + 10 terms dropped
so initialization effects stay out of the sum. Gradients are exact (the
filtered log-variance gradient follows its own linear recursion) and feed a
quasi-Newton optimizer; a derivative-free simplex polish takes over when the
line search gives up. Standard errors come from the sandwich
(kappa4 - 1) J^{-1} / n with J the outer product of log-variance gradients.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np
from scipy.optimize import minimize

from ._kernels import rec
from ._rng import stream
from .diagnostics import DiagnosticsReport, diagnose
from .errors import (
    CovarianceUnavailableError,
    EstimationError,
    InvalidInputError,
)
from .innovations import normal
from .model import (
    DEFAULT_FLOOR,
    EgarchParams,
    InitPolicy,
    LogGarchParams,
    filter_egarch,
    filter_log_garch,
    lag_poly_roots_outside,
)
from .model import _series_values  # shared coercion, same rules as filtering

__all__ = [
    "FitOptions",
    "FitResult",
    "param_names",
    "qmle_objective",
    "grad_log_sigma2",
    "fit_log_garch",
    "fit_egarch",
    "asymptotic_covariance",
]

_PENALTY = 1e10
_COND_CAP = 1e12

Params = Union[LogGarchParams, EgarchParams]


@dataclass(frozen=True)
class FitOptions:
    """Optimizer and filtering knobs.

    ``restarts`` perturbed starting points are tried besides the
    moment-matched one. ``start`` overrides the automatic start and must be
    admissible. ``enforce_invertibility`` adds the empirical contraction
    constraint for the first-order EGARCH.
    """

    max_iters: int = 500
    objective_tol: float = 1e-10
    param_tol: float = 1e-8
    restarts: int = 4
    floor: float = DEFAULT_FLOOR
    r0: Optional[int] = None
    init: InitPolicy = InitPolicy()
    seed: int = 0
    start: Optional[Params] = None
    enforce_invertibility: bool = True


@dataclass(frozen=True, eq=False)
class FitResult:
    """A fitted model with everything needed to re-evaluate and compare it."""

    params: Params
    family: str
    q_n: float
    loglik: float
    se: Optional[np.ndarray]
    acov: Optional[np.ndarray]
    kurtosis: float
    eta: np.ndarray
    converged: bool
    n: int
    r0: int
    n_used: int
    iterations: int
    message: str
    cov_warning: Optional[str]
    diagnostics: Optional[DiagnosticsReport]
    eps: np.ndarray
    floor: float
    init: InitPolicy

    @property
    def names(self) -> list[str]:
        return param_names(self.params)

    def to_dict(self) -> dict:
        out = {
            "family": self.family,
            "converged": self.converged,
            "n": self.n,
            "r0": self.r0,
            "n_used": self.n_used,
            "iterations": self.iterations,
            "loglik": self.loglik,
            "objective": self.q_n,
            "kurtosis": self.kurtosis,
            "params": dict(zip(self.names, self.params.as_vector().tolist())),
            "se": dict(zip(self.names, self.se.tolist())) if self.se is not None else None,
            "message": self.message,
        }
        if self.cov_warning:
            out["cov_warning"] = self.cov_warning
        return out


def param_names(params: Params) -> list[str]:
    if isinstance(params, LogGarchParams):
        return (
            ["omega"]
            + [f"alpha_pos_{i + 1}" for i in range(params.q)]
            + [f"alpha_neg_{i + 1}" for i in range(params.q)]
            + [f"beta_{j + 1}" for j in range(params.p)]
        )
    return (
        ["omega"]
        + [f"beta_{j + 1}" for j in range(params.p)]
        + [f"gamma_{k + 1}" for k in range(params.num_lags)]
        + [f"delta_{k + 1}" for k in range(params.num_lags)]
    )


class _LogGarchProblem:
    """Precomputed data views plus objective/gradient evaluation."""

    family = "log-garch"

    def __init__(self, values: np.ndarray, p: int, q: int, options: FitOptions):
        self.values = values
        self.p, self.q = p, q
        self.dim = 1 + 2 * q + p
        self.n = values.size
        self.r0 = options.r0 if options.r0 is not None else max(p, q) + 10
        if not 0 <= self.r0 < self.n:
            raise InvalidInputError(f"r0 = {self.r0} outside [0, {self.n})")
        self.window = slice(self.r0, self.n)
        self.n_used = self.n - self.r0
        floor = options.floor
        if not floor > 0:
            raise InvalidInputError(f"floor must be positive, got {floor}")
        pre_eps2, pre_ls_val = options.init.resolve(values)

        self.le2 = np.empty(q + self.n)
        self.code = np.empty(q + self.n, dtype=np.uint8)
        self.le2[:q] = math.log(max(pre_eps2, floor * floor))
        self.code[:q] = 2
        np.log(np.maximum(np.abs(values), floor), out=self.le2[q:])
        self.le2[q:] *= 2.0
        self.code[q:] = np.where(values > 0, 1, np.where(values < 0, 0, 2)).astype(
            np.uint8
        )
        self.pre_ls = np.full(p, pre_ls_val)
        self.e2 = values * values
        self.le2_data_mean = float(self.le2[q:].mean())

    def admissible(self, vec: np.ndarray) -> bool:
        if not np.isfinite(vec).all():
            return False
        beta = vec[1 + 2 * self.q :]
        if self.p == 1:
            return abs(beta[0]) < 1.0 - 1e-10
        return lag_poly_roots_outside(beta)

    def _split(self, vec: np.ndarray):
        q = self.q
        return vec[0], vec[1 : 1 + q], vec[1 + q : 1 + 2 * q], vec[1 + 2 * q :]

    def filter_ls(self, vec: np.ndarray) -> Optional[np.ndarray]:
        om, ap, am, b = self._split(vec)
        ls = np.empty(self.n)
        status = rec.loggarch_filter(
            float(om),
            np.ascontiguousarray(ap),
            np.ascontiguousarray(am),
            np.ascontiguousarray(b),
            self.le2,
            self.code,
            self.pre_ls,
            ls,
        )
        return None if status >= 0 else ls

    def filter_ls_grad(self, vec: np.ndarray):
        om, ap, am, b = self._split(vec)
        ls = np.empty(self.n)
        grad = np.empty((self.n, self.dim))
        status = rec.loggarch_filter_grad(
            float(om),
            np.ascontiguousarray(ap),
            np.ascontiguousarray(am),
            np.ascontiguousarray(b),
            self.le2,
            self.code,
            self.pre_ls,
            ls,
            grad,
        )
        return (None, None) if status >= 0 else (ls, grad)

    def value(self, vec: np.ndarray) -> float:
        if not self.admissible(vec):
            return _PENALTY
        ls = self.filter_ls(vec)
        if ls is None:
            return _PENALTY
        return _objective_from_ls(self.e2, ls, self.window, self.n)

    def value_grad(self, vec: np.ndarray):
        if not self.admissible(vec):
            return _PENALTY, np.zeros(self.dim)
        ls, grad = self.filter_ls_grad(vec)
        if ls is None:
            return _PENALTY, np.zeros(self.dim)
        return _objective_grad_from_ls(self.e2, ls, grad, self.window, self.n, self.dim)

    def params_from(self, vec: np.ndarray) -> LogGarchParams:
        return LogGarchParams.from_vector(vec, self.p, self.q)

    def starts(self, options: FitOptions) -> list[np.ndarray]:
        p, q = self.p, self.q
        m_norm = normal().mean_log_sq
        tau0 = self.le2_data_mean - m_norm

        def build(beta1: float, alpha_each: float, rng=None) -> np.ndarray:
            beta = np.zeros(p)
            if p:
                beta[0] = beta1
                if rng is not None and p > 1:
                    beta[1:] = 0.02 * rng.standard_normal(p - 1)
            alpha = np.full(q, alpha_each)
            if rng is not None and q:
                alpha = alpha + 0.02 * rng.standard_normal(q)
            abar = alpha.sum() if q else 0.0
            denom = 1.0 - beta.sum() - abar
            omega = tau0 * max(denom, 0.02) - abar * m_norm
            return np.concatenate([[omega], alpha, alpha, beta])

        if options.start is not None:
            if not isinstance(options.start, LogGarchParams):
                raise EstimationError("start must be LogGarchParams for this family")
            base = options.start.as_vector()
            if base.shape != (self.dim,) or not self.admissible(base):
                raise EstimationError(
                    "starting point violates the stationarity requirement"
                )
        else:
            base = build(0.9 if p else 0.0, 0.05 / q if q else 0.0)
        out = [base]
        for k in range(1, options.restarts + 1):
            rng = stream(options.seed, 1000 + k)
            for _ in range(50):
                if options.start is not None:
                    cand = base + np.concatenate(
                        [
                            [0.1 * rng.standard_normal()],
                            0.03 * rng.standard_normal(2 * q + p),
                        ]
                    )
                else:
                    beta1 = float(np.clip(0.9 + 0.1 * rng.standard_normal(), -0.5, 0.975))
                    cand = build(beta1 if p else 0.0, 0.05 / q if q else 0.0, rng)
                if self.admissible(cand):
                    out.append(cand)
                    break
        return out


class _EgarchProblem:
    family = "egarch"

    def __init__(self, values: np.ndarray, p: int, num_lags: int, options: FitOptions):
        self.values = values
        self.p, self.ell = p, num_lags
        self.dim = 1 + p + 2 * num_lags
        self.n = values.size
        self.r0 = options.r0 if options.r0 is not None else max(p, num_lags) + 10
        if not 0 <= self.r0 < self.n:
            raise InvalidInputError(f"r0 = {self.r0} outside [0, {self.n})")
        self.window = slice(self.r0, self.n)
        self.n_used = self.n - self.r0
        _, pre_ls_val = options.init.resolve(values)
        self.pre_ls = np.full(p, pre_ls_val)
        self.e2 = values * values
        self.abs_values = np.abs(values)
        floor = options.floor
        self.le2_data_mean = float(
            np.mean(2.0 * np.log(np.maximum(self.abs_values, floor)))
        )
        self.enforce_inv = options.enforce_invertibility and p == 1 and num_lags == 1

    def _split(self, vec: np.ndarray):
        p, ell = self.p, self.ell
        return (
            vec[0],
            vec[1 : 1 + p],
            vec[1 + p : 1 + p + ell],
            vec[1 + p + ell :],
        )

    def admissible(self, vec: np.ndarray) -> bool:
        if not np.isfinite(vec).all():
            return False
        om, b, g, d = self._split(vec)
        if np.any(d < np.abs(g)):
            return False
        if self.enforce_inv:
            beta = b[0]
            if not 1e-10 < beta < 1.0 - 1e-10:
                return False
            scale = math.exp(min(-0.5 * om / (1.0 - beta), 700.0))
            with np.errstate(over="ignore"):
                u = 0.5 * (g[0] * self.values + d[0] * self.abs_values) * scale
                margin = float(np.mean(np.log(np.maximum(beta, u - beta))))
            return margin < 0.0
        if self.p == 1:
            return abs(b[0]) < 1.0 - 1e-10
        return lag_poly_roots_outside(b)

    def filter_ls(self, vec: np.ndarray):
        om, b, g, d = self._split(vec)
        ls = np.empty(self.n)
        eta = np.empty(self.n)
        status = rec.egarch_filter(
            float(om),
            np.ascontiguousarray(b),
            np.ascontiguousarray(g),
            np.ascontiguousarray(d),
            self.values,
            self.pre_ls,
            ls,
            eta,
        )
        return None if status >= 0 else ls

    def filter_ls_grad(self, vec: np.ndarray):
        om, b, g, d = self._split(vec)
        ls = np.empty(self.n)
        eta = np.empty(self.n)
        grad = np.empty((self.n, self.dim))
        status = rec.egarch_filter_grad(
            float(om),
            np.ascontiguousarray(b),
            np.ascontiguousarray(g),
            np.ascontiguousarray(d),
            self.values,
            self.pre_ls,
            ls,
            eta,
            grad,
        )
        return (None, None) if status >= 0 else (ls, grad)

    def value(self, vec: np.ndarray) -> float:
        if not self.admissible(vec):
            return _PENALTY
        ls = self.filter_ls(vec)
        if ls is None:
            return _PENALTY
        return _objective_from_ls(self.e2, ls, self.window, self.n)

    def value_grad(self, vec: np.ndarray):
        if not self.admissible(vec):
            return _PENALTY, np.zeros(self.dim)
        ls, grad = self.filter_ls_grad(vec)
        if ls is None:
            return _PENALTY, np.zeros(self.dim)
        return _objective_grad_from_ls(self.e2, ls, grad, self.window, self.n, self.dim)

    def params_from(self, vec: np.ndarray) -> EgarchParams:
        return EgarchParams.from_vector(vec, self.p, self.ell)

    def starts(self, options: FitOptions) -> list[np.ndarray]:
        p, ell = self.p, self.ell
        m_norm = normal().mean_log_sq
        abs_norm = normal().abs_mean
        tau0 = self.le2_data_mean - m_norm

        def build(beta1: float, delta1: float, rng=None) -> np.ndarray:
            beta = np.zeros(p)
            if p:
                beta[0] = beta1
            gamma = np.zeros(ell)
            delta = np.zeros(ell)
            if ell:
                delta[0] = delta1
                if rng is not None:
                    gamma[0] = 0.05 * rng.standard_normal()
                    delta[0] = max(abs(gamma[0]) + 0.02, delta1 + 0.05 * rng.standard_normal())
            denom = 1.0 - beta.sum()
            omega = tau0 * max(denom, 0.02) - delta.sum() * abs_norm
            return np.concatenate([[omega], beta, gamma, delta])

        if options.start is not None:
            if not isinstance(options.start, EgarchParams):
                raise EstimationError("start must be EgarchParams for this family")
            base = options.start.as_vector()
            if base.shape != (self.dim,) or not self.admissible(base):
                raise EstimationError(
                    "starting point violates the fitting constraints"
                )
        else:
            base = build(0.9 if p else 0.0, 0.2 if ell else 0.0)
            if not self.admissible(base):
                for shrink in (0.1, 0.05, 0.02):
                    base = build(0.9 if p else 0.0, shrink if ell else 0.0)
                    if self.admissible(base):
                        break
        out = [base]
        for k in range(1, options.restarts + 1):
            rng = stream(options.seed, 2000 + k)
            for _ in range(50):
                if options.start is not None:
                    cand = base + 0.03 * rng.standard_normal(self.dim)
                else:
                    beta1 = float(np.clip(0.9 + 0.05 * rng.standard_normal(), 0.2, 0.985))
                    cand = build(beta1 if p else 0.0, 0.2 if ell else 0.0, rng)
                if self.admissible(cand):
                    out.append(cand)
                    break
        return out


def _objective_from_ls(e2, ls, window, n) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        w = window
        terms = e2[w] * np.exp(-ls[w]) + ls[w]
        total = float(terms.sum())
    return total / n if math.isfinite(total) else _PENALTY


def _objective_grad_from_ls(e2, ls, grad, window, n, dim):
    with np.errstate(over="ignore", invalid="ignore"):
        w = window
        ratio = e2[w] * np.exp(-ls[w])
        total = float((ratio + ls[w]).sum())
        if not math.isfinite(total):
            return _PENALTY, np.zeros(dim)
        g = ((1.0 - ratio)[:, None] * grad[w]).sum(axis=0) / n
    if not np.isfinite(g).all():
        return _PENALTY, np.zeros(dim)
    return total / n, g


def _run_fit(problem, options: FitOptions):
    best = None
    for x0 in problem.starts(options):
        res = minimize(
            problem.value_grad,
            x0,
            jac=True,
            method="L-BFGS-B",
            options={
                "maxiter": options.max_iters,
                "ftol": options.objective_tol,
                "gtol": options.param_tol,
            },
        )
        fun, x, nit, ok, msg = res.fun, res.x, res.nit, bool(res.success), str(res.message)
        if not ok or fun >= _PENALTY:
            seed_x = x if np.isfinite(fun) and fun < _PENALTY else x0
            polish = minimize(
                problem.value,
                seed_x,
                method="Nelder-Mead",
                options={
                    "maxiter": 400 * problem.dim,
                    "fatol": options.objective_tol,
                    "xatol": options.param_tol,
                },
            )
            if polish.fun < fun:
                fun, x, ok = polish.fun, polish.x, bool(polish.success)
                msg = f"simplex fallback: {polish.message}"
                nit += polish.nit
        cand = (fun, x, nit, ok, msg)
        if best is None or fun < best[0]:
            best = cand
    if best is None or best[0] >= _PENALTY:
        raise EstimationError("no admissible optimum found from any starting point")
    return best


def asymptotic_covariance(
    grad: np.ndarray, eta: np.ndarray, n: int
) -> tuple[np.ndarray, float]:
    """Sandwich covariance (kappa4 - 1) J^{-1} / n from windowed ingredients.

    ``grad`` holds the log-variance gradient rows over the likelihood
    window, ``eta`` the standardized residuals over the same window. Raises
    when J is numerically singular.
    """
    grad = np.asarray(grad, dtype=np.float64)
    eta = np.asarray(eta, dtype=np.float64)
    if grad.ndim != 2 or eta.ndim != 1 or grad.shape[0] != eta.size:
        raise InvalidInputError("gradient rows and residuals must align")
    j = grad.T @ grad / grad.shape[0]
    cond = float(np.linalg.cond(j))
    if not math.isfinite(cond) or cond >= _COND_CAP:
        raise CovarianceUnavailableError(
            f"information matrix condition number {cond:.3g} exceeds {_COND_CAP:.0e}",
            condition_number=cond,
        )
    kappa4 = float(np.mean(eta**4))
    acov = (kappa4 - 1.0) * np.linalg.inv(j) / n
    return acov, kappa4


def _finalize(problem, options: FitOptions, best) -> FitResult:
    fun, x, nit, ok, msg = best
    ls, grad = problem.filter_ls_grad(x)
    if ls is None:
        raise EstimationError("optimum no longer evaluable (filter explosion)")
    eta = problem.values * np.exp(-0.5 * ls)
    w = problem.window
    params = problem.params_from(x)

    se = acov = None
    cov_warning = None
    kappa4 = float(np.mean(eta[w] ** 4))
    try:
        acov, kappa4 = asymptotic_covariance(grad[w], eta[w], problem.n)
        se = np.sqrt(np.diag(acov))
    except CovarianceUnavailableError as exc:
        cov_warning = str(exc)
    if kappa4 <= 1.0 + 1e-12 and acov is not None:
        warnings.warn(
            "residual fourth moment is degenerate (kappa4 <= 1); the "
            "asymptotic variance factor is zero"
        )

    a_hat = float(np.mean(eta[w] > 0))
    a_hat = min(max(a_hat, 1e-6), 1.0 - 1e-6)
    diag = None
    if isinstance(params, LogGarchParams):
        diag = diagnose(params, sign_prob=a_hat, horizon=3000, reps=20)

    return FitResult(
        params=params,
        family=problem.family,
        q_n=float(fun),
        loglik=-0.5 * float(fun),
        se=se,
        acov=acov,
        kurtosis=kappa4,
        eta=eta,
        converged=ok,
        n=problem.n,
        r0=problem.r0,
        n_used=problem.n_used,
        iterations=int(nit),
        message=msg,
        cov_warning=cov_warning,
        diagnostics=diag,
        eps=problem.values,
        floor=options.floor,
        init=options.init,
    )


def _guard_length(n: int, dim: int):
    if n < 50 * dim:
        raise EstimationError(
            f"sample too short: n = {n} < 50 x {dim} parameters"
        )


def fit_log_garch(
    series, p: int = 1, q: int = 1, options: Optional[FitOptions] = None
) -> FitResult:
    """Fit the asymmetric log-GARCH(p, q) by QML."""
    if p < 0 or q < 0:
        raise InvalidInputError(f"orders must be nonnegative, got p={p}, q={q}")
    values = _series_values(series)
    options = options or FitOptions()
    _guard_length(values.size, 1 + 2 * q + p)
    problem = _LogGarchProblem(values, p, q, options)
    return _finalize(problem, options, _run_fit(problem, options))


def fit_egarch(
    series, p: int = 1, num_lags: int = 1, options: Optional[FitOptions] = None
) -> FitResult:
    """Fit the EGARCH(p, num_lags) by QML under its shape constraints."""
    if p < 0 or num_lags < 0:
        raise InvalidInputError(
            f"orders must be nonnegative, got p={p}, num_lags={num_lags}"
        )
    values = _series_values(series)
    options = options or FitOptions()
    _guard_length(values.size, 1 + p + 2 * num_lags)
    problem = _EgarchProblem(values, p, num_lags, options)
    return _finalize(problem, options, _run_fit(problem, options))


def _problem_for(params: Params, series, options: FitOptions):
    values = _series_values(series)
    if isinstance(params, LogGarchParams):
        return _LogGarchProblem(values, params.p, params.q, options)
    return _EgarchProblem(values, params.p, params.num_lags, options)


def qmle_objective(params: Params, series, options: Optional[FitOptions] = None) -> float:
    """Evaluate the quasi-likelihood objective at fixed parameters.

    A filter overflow returns +inf, a sentinel an optimizer can reject
    without exception handling.
    """
    options = options or FitOptions()
    problem = _problem_for(params, series, options)
    ls = problem.filter_ls(params.as_vector())
    if ls is None:
        return math.inf
    return _objective_from_ls(problem.e2, ls, problem.window, problem.n)


def _raise_filter_error(params: Params, series, options: FitOptions):
    if isinstance(params, LogGarchParams):
        filter_log_garch(params, series, init=options.init, floor=options.floor)
    else:
        filter_egarch(params, series, init=options.init)
    raise EstimationError("filter left the representable range")


def grad_log_sigma2(
    params: Params, series, options: Optional[FitOptions] = None
) -> np.ndarray:
    """Gradient of the filtered log-variance path, one row per observation."""
    options = options or FitOptions()
    problem = _problem_for(params, series, options)
    ls, grad = problem.filter_ls_grad(params.as_vector())
    if ls is None:
        # re-run the plain filter so the error carries the failing step
        _raise_filter_error(params, series, options)
    return grad
