"""Stability, moment and dependence diagnostics for the log-GARCH.

The recursion has two linear-algebra views. The full state vector (gated
log squared returns plus lagged log-variances, dimension 2q + p) evolves
through random matrices whose top Lyapunov exponent decides strict
stationarity. The compact companion view (dimension max(p, q)) drives the
moment and tail results: spectral radii of expected Kronecker powers give
moment existence, the essential supremum matrix gives the log-moment
condition and the filter-forgetting bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Optional

import numpy as np

from ._kernels import rec
from ._rng import stream
from .errors import (
    CapExceededError,
    DegeneracyError,
    InvalidInputError,
    NotApplicableError,
)
from .innovations import InnovationSpec
from .model import LogGarchParams

__all__ = [
    "VectorSystem",
    "CompanionSystem",
    "LyapunovEstimate",
    "AnyLogMomentCheck",
    "LeverageReport",
    "TailReport",
    "HillEstimate",
    "DiagnosticsReport",
    "vector_system",
    "companion_system",
    "spectral_radius",
    "lyapunov_mc",
    "lyapunov_closed_11",
    "moment_matrix_A",
    "moment_matrix_C",
    "check_any_log_moment",
    "leverage_covariance_11",
    "compute_lambda",
    "moment_order_11",
    "tail_index_11",
    "hill_estimate",
    "cramer_condition_catalog",
    "diagnose",
]

# Matrix products beyond this state dimension are refused.
LYAPUNOV_DIM_CAP = 64
# Dense Kronecker powers beyond this size are refused.
DEFAULT_DIM_CAP = 4096


@dataclass(frozen=True, eq=False)
class VectorSystem:
    """Random-coefficient form of the full state recursion.

    State (gated positive log eps^2 block, gated negative block, lagged
    log-variances); the transition matrix depends on the innovation only
    through its sign.
    """

    params: LogGarchParams

    @property
    def dim(self) -> int:
        return 2 * self.params.q + self.params.p

    def _weights(self) -> np.ndarray:
        pr = self.params
        return np.concatenate([pr.alpha_pos, pr.alpha_neg, pr.beta])

    def transition(self, positive: bool) -> np.ndarray:
        pr = self.params
        q, p = pr.q, pr.p
        d = self.dim
        w = self._weights()
        c = np.zeros((d, d))
        if q >= 1:
            if positive:
                c[0, :] = w
            else:
                c[q, :] = w
            for i in range(1, q):
                c[i, i - 1] = 1.0
                c[q + i, q + i - 1] = 1.0
        if p >= 1:
            c[2 * q, :] = w
            for j in range(1, p):
                c[2 * q + j, 2 * q + j - 1] = 1.0
        return c

    def shift(self, positive: bool, log_eta2: float) -> np.ndarray:
        pr = self.params
        q, p = pr.q, pr.p
        b = np.zeros(self.dim)
        drive = pr.omega + log_eta2
        if q >= 1:
            if positive:
                b[0] = drive
            else:
                b[q] = drive
        if p >= 1:
            b[2 * q] = pr.omega
        return b


@dataclass(frozen=True, eq=False)
class CompanionSystem:
    """Companion form of order max(p, q) with sign-dependent first row."""

    params: LogGarchParams

    @property
    def dim(self) -> int:
        return max(self.params.p, self.params.q)

    def _padded(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pr = self.params
        r = self.dim
        ap = np.zeros(r)
        am = np.zeros(r)
        b = np.zeros(r)
        ap[: pr.q] = pr.alpha_pos
        am[: pr.q] = pr.alpha_neg
        b[: pr.p] = pr.beta
        return ap, am, b

    def first_row(self, signs_positive) -> np.ndarray:
        """Row (mu_1, ..., mu_r) for the given lagged innovation signs."""
        ap, am, b = self._padded()
        s = np.asarray(signs_positive, dtype=bool)
        if s.shape != (self.dim,):
            raise InvalidInputError(f"need {self.dim} signs, got shape {s.shape}")
        return np.where(s, ap, am) + b

    def transition(self, signs_positive) -> np.ndarray:
        r = self.dim
        a = np.zeros((r, r))
        a[0, :] = self.first_row(signs_positive)
        for i in range(1, r):
            a[i, i - 1] = 1.0
        return a

    def abs_sup(self) -> np.ndarray:
        """Entrywise essential supremum of the absolute companion matrix."""
        ap, am, b = self._padded()
        r = self.dim
        a = np.zeros((r, r))
        a[0, :] = np.maximum(np.abs(ap + b), np.abs(am + b))
        for i in range(1, r):
            a[i, i - 1] = 1.0
        return a


def vector_system(params: LogGarchParams) -> VectorSystem:
    return VectorSystem(params)


def companion_system(params: LogGarchParams) -> CompanionSystem:
    return CompanionSystem(params)


def spectral_radius(
    mat: np.ndarray,
    dense_cap: int = DEFAULT_DIM_CAP,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> float:
    """Largest eigenvalue modulus; power iteration beyond the dense cap.

    The power-iteration branch assumes an entrywise nonnegative matrix,
    which is all this package produces.
    """
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidInputError(f"need a square matrix, got shape {mat.shape}")
    d = mat.shape[0]
    if d == 0:
        return 0.0
    if d <= dense_cap:
        return float(np.max(np.abs(np.linalg.eigvals(mat))))
    v = np.full(d, 1.0 / d)
    lam = 0.0
    for _ in range(max_iter):
        w = mat @ v
        norm = w.sum()
        if norm == 0.0:
            return 0.0
        new = norm / v.sum()
        w /= norm
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            return float(new)
        lam, v = new, w
    return float(lam)


@dataclass(frozen=True)
class LyapunovEstimate:
    estimate: float
    std_error: float
    method: str  # "monte-carlo" or "closed-form"
    annihilated: bool = False


def lyapunov_mc(
    params: LogGarchParams,
    dist: Optional[InnovationSpec] = None,
    horizon: int = 10_000,
    reps: int = 50,
    seed: int = 0,
    discard: int = 100,
    sign_prob: Optional[float] = None,
) -> LyapunovEstimate:
    """Monte Carlo top Lyapunov exponent of the state transition product.

    Multiplies realized transition matrices with per-step renormalization
    under the operator 1-norm; log-norms from the first ``discard`` steps
    are dropped so the estimate is free of the start-up bias, then averaged
    per replication. The transition depends on the innovation only through
    its sign, so only P(eta > 0) matters.
    """
    if reps < 2:
        raise InvalidInputError(f"need at least 2 replications, got {reps}")
    if not 0 <= discard < horizon:
        raise InvalidInputError(f"need 0 <= discard < horizon, got {discard}, {horizon}")
    a = sign_prob if sign_prob is not None else (dist.sign_prob if dist else 0.5)
    if not 0.0 < a < 1.0:
        raise InvalidInputError(f"sign probability must be in (0, 1), got {a}")
    sys = vector_system(params)
    if sys.dim == 0:
        # No feedback at all: the state is empty and log sigma^2 is constant.
        return LyapunovEstimate(-math.inf, 0.0, "monte-carlo")
    if sys.dim > LYAPUNOV_DIM_CAP:
        raise CapExceededError(
            f"state dimension {sys.dim} exceeds the cap {LYAPUNOV_DIM_CAP}"
        )
    cp = np.ascontiguousarray(sys.transition(True))
    cm = np.ascontiguousarray(sys.transition(False))
    estimates = np.empty(reps)
    for r in range(reps):
        rng = stream(seed, r)
        signs = (rng.random(horizon) < a).astype(np.uint8)
        acc, used, zero_step = rec.lyapunov_accumulate(cp, cm, signs, discard)
        if zero_step >= 0:
            return LyapunovEstimate(-math.inf, 0.0, "monte-carlo", annihilated=True)
        estimates[r] = acc / used
    return LyapunovEstimate(
        estimate=float(estimates.mean()),
        std_error=float(estimates.std(ddof=1) / math.sqrt(reps)),
        method="monte-carlo",
    )


def lyapunov_closed_11(params: LogGarchParams, sign_prob: float = 0.5) -> float:
    """First-order closed form: the product telescopes to scalar factors."""
    if params.p != 1 or params.q != 1:
        raise NotApplicableError(
            "closed form needs p == q == 1", failed_condition="p == q == 1"
        )
    if not 0.0 < sign_prob < 1.0:
        raise InvalidInputError(f"sign probability must be in (0, 1), got {sign_prob}")
    up = abs(params.alpha_pos[0] + params.beta[0])
    dn = abs(params.alpha_neg[0] + params.beta[0])
    if up == 0.0 or dn == 0.0:
        return -math.inf
    return sign_prob * math.log(up) + (1.0 - sign_prob) * math.log(dn)


def _kron_power(mat: np.ndarray, m: int) -> np.ndarray:
    return reduce(np.kron, [mat] * m)


def moment_matrix_A(
    params: LogGarchParams,
    m: int,
    sign_prob: float = 0.5,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> np.ndarray:
    """Expected m-th Kronecker power of the absolute companion matrix.

    The first row mixes r = max(p, q) independent lagged signs, so the
    expectation enumerates all 2^r sign patterns.
    """
    if m < 1:
        raise InvalidInputError(f"m must be >= 1, got {m}")
    if not 0.0 < sign_prob < 1.0:
        raise InvalidInputError(f"sign probability must be in (0, 1), got {sign_prob}")
    sys = companion_system(params)
    r = sys.dim
    if r == 0:
        raise NotApplicableError(
            "moment matrices need at least one lag", failed_condition="max(p, q) >= 1"
        )
    if r > 16:
        raise CapExceededError(f"sign enumeration over 2^{r} patterns refused")
    if r**m > dim_cap:
        raise CapExceededError(f"dimension {r}^{m} exceeds the cap {dim_cap}")
    out = np.zeros((r**m, r**m))
    for signs in product((True, False), repeat=r):
        prob = math.prod(sign_prob if s else 1.0 - sign_prob for s in signs)
        out += prob * _kron_power(np.abs(sys.transition(signs)), m)
    return out


def moment_matrix_C(
    params: LogGarchParams,
    m: int,
    sign_prob: float = 0.5,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> np.ndarray:
    """Expected m-th Kronecker power of the absolute state transition.

    The full-state transition depends on one sign only, so the expectation
    is a two-term mixture.
    """
    if m < 1:
        raise InvalidInputError(f"m must be >= 1, got {m}")
    if not 0.0 < sign_prob < 1.0:
        raise InvalidInputError(f"sign probability must be in (0, 1), got {sign_prob}")
    sys = vector_system(params)
    d = sys.dim
    if d == 0:
        raise NotApplicableError(
            "moment matrices need at least one lag", failed_condition="2q + p >= 1"
        )
    if d**m > dim_cap:
        raise CapExceededError(f"dimension {d}^{m} exceeds the cap {dim_cap}")
    return sign_prob * _kron_power(np.abs(sys.transition(True)), m) + (
        1.0 - sign_prob
    ) * _kron_power(np.abs(sys.transition(False)), m)


@dataclass(frozen=True)
class AnyLogMomentCheck:
    """Existence of some finite log-moment of sigma^2, two equivalent routes."""

    ok: bool
    rho: float
    coeff_sum: float


def check_any_log_moment(params: LogGarchParams) -> AnyLogMomentCheck:
    """Check rho of the supremum companion matrix against its scalar form.

    For companion matrices the spectral-radius condition collapses to
    sum_i max(|alpha_pos_i + beta_i|, |alpha_neg_i + beta_i|) < 1.
    """
    sys = companion_system(params)
    if sys.dim == 0:
        return AnyLogMomentCheck(ok=True, rho=0.0, coeff_sum=0.0)
    sup = sys.abs_sup()
    coeff_sum = float(sup[0, :].sum())
    rho = spectral_radius(sup)
    return AnyLogMomentCheck(ok=bool(coeff_sum < 1.0), rho=rho, coeff_sum=coeff_sum)


@dataclass(frozen=True)
class LeverageReport:
    tau: float
    covariance: float


def leverage_covariance_11(
    params: LogGarchParams, dist: InnovationSpec
) -> LeverageReport:
    """Covariance between the lagged innovation and current log-variance.

    First-order model, symmetric innovations with a known moment catalog.
    ``tau`` is the stationary mean of log sigma^2.
    """
    if params.p != 1 or params.q != 1:
        raise NotApplicableError(
            "leverage formula needs p == q == 1", failed_condition="p == q == 1"
        )
    if not dist.symmetric:
        raise NotApplicableError(
            "leverage formula needs a symmetric innovation distribution",
            failed_condition="sign_prob == 0.5",
        )
    needed = (dist.abs_mean, dist.mean_log_sq, dist.abs_log_sq_mean)
    if any(v is None for v in needed):
        raise NotApplicableError(
            "innovation moment catalog is incomplete",
            failed_condition="abs_mean, mean_log_sq, abs_log_sq_mean known",
        )
    ap, am, b = params.alpha_pos[0], params.alpha_neg[0], params.beta[0]
    persistence = b + 0.5 * (ap + am)
    if not -1.0 < persistence < 1.0:
        raise NotApplicableError(
            f"no stationary mean: |beta + (alpha_pos + alpha_neg)/2| = "
            f"{abs(persistence):.4g} >= 1",
            failed_condition="|beta + (alpha_pos + alpha_neg)/2| < 1",
        )
    tau = (params.omega + 0.5 * (ap + am) * dist.mean_log_sq) / (1.0 - persistence)
    cov = 0.5 * (ap - am) * (dist.abs_mean * tau + dist.abs_log_sq_mean)
    return LeverageReport(tau=float(tau), covariance=float(cov))


def compute_lambda(params: LogGarchParams) -> float:
    """Invertibility-side coefficient bound for the filtered recursion.

    max_i max(|alpha_pos_i|, |alpha_neg_i|) times the summed entry-sum norms
    of all powers of the supremum companion matrix; the geometric series is
    evaluated exactly through a linear solve (all entries nonnegative).
    """
    sys = companion_system(params)
    if params.q == 0:
        return 0.0
    alpha_max = max(
        max(abs(a) for a in params.alpha_pos),
        max(abs(a) for a in params.alpha_neg),
    )
    if sys.dim == 0:
        return 0.0
    sup = sys.abs_sup()
    rho = spectral_radius(sup)
    if rho >= 1.0:
        raise NotApplicableError(
            f"power series diverges: rho = {rho:.6g} >= 1",
            failed_condition="rho(sup companion) < 1",
        )
    ones = np.ones(sys.dim)
    total = float(ones @ np.linalg.solve(np.eye(sys.dim) - sup, ones))
    return alpha_max * total


def moment_order_11(params: LogGarchParams, s: float) -> tuple[float, float]:
    """Guaranteed finite-moment orders (sigma^2, returns) at level s.

    Needs the first-order model with positive asymmetry coefficients and
    both signed persistences inside (0, 1); the innovation must have a
    finite moment of order 2s (caller's responsibility to check).
    """
    _order_guards(params, s, "s")
    ap, am = params.alpha_pos[0], params.alpha_neg[0]
    amax = max(ap, am)
    return s / amax, 2.0 * s / max(amax, 1.0)


def tail_index_11(params: LogGarchParams, s_prime: float) -> tuple[float, float]:
    """Power-law tail indices (sigma^2, returns) inherited from the noise.

    ``s_prime`` is half the innovation tail exponent. Same hypotheses as
    the moment-order result.
    """
    _order_guards(params, s_prime, "s_prime")
    ap, am = params.alpha_pos[0], params.alpha_neg[0]
    amax = max(ap, am)
    return s_prime / amax, 2.0 * s_prime / max(amax, 1.0)


def _order_guards(params: LogGarchParams, s: float, name: str):
    if params.p != 1 or params.q != 1:
        raise NotApplicableError(
            "moment/tail orders need p == q == 1", failed_condition="p == q == 1"
        )
    if not s > 0:
        raise InvalidInputError(f"{name} must be positive, got {s}")
    ap, am, b = params.alpha_pos[0], params.alpha_neg[0], params.beta[0]
    if min(ap, am) <= 0:
        raise NotApplicableError(
            f"need positive asymmetry coefficients, got ({ap}, {am})",
            failed_condition="min(alpha_pos, alpha_neg) > 0",
        )
    for label, val in (("alpha_pos", ap), ("alpha_neg", am)):
        if not 0.0 < b + val < 1.0:
            raise NotApplicableError(
                f"beta + {label} = {b + val:.4g} outside (0, 1)",
                failed_condition="beta + alpha in (0, 1)",
            )


@dataclass(frozen=True)
class HillEstimate:
    index: float
    k: int
    n: int


def hill_estimate(x, k: Optional[int] = None) -> HillEstimate:
    """Hill tail-index estimator on a positive sample.

    Uses the k largest order statistics against the (k+1)-th; k defaults to
    floor(n^0.6).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidInputError(f"need a one-dimensional sample, got shape {x.shape}")
    n = x.size
    if n < 10:
        raise InvalidInputError(f"need at least 10 observations, got {n}")
    if not (np.isfinite(x).all() and (x > 0).all()):
        raise InvalidInputError("sample must be positive and finite")
    if k is None:
        k = int(n**0.6)
    if not 1 <= k <= n - 1:
        raise InvalidInputError(f"need 1 <= k <= n - 1, got k = {k}")
    top = np.sort(x)[::-1]
    spacings = np.log(top[:k]) - math.log(top[k])
    mean_spacing = float(spacings.mean())
    if mean_spacing <= 0.0:
        raise DegeneracyError(
            f"degenerate tail: the top {k + 1} order statistics are tied"
        )
    return HillEstimate(index=1.0 / mean_spacing, k=k, n=n)


def cramer_condition_catalog(dist: InnovationSpec) -> Optional[bool]:
    """Whether E exp(s |log eta^2|) is finite for some s > 0.

    True for the built-in kinds (bounded density near zero plus all
    polynomial moments, or bounded support); None means unknown.
    """
    return dist.exp_log_moment


@dataclass(frozen=True)
class TailReport:
    sigma2_index: float
    eps_index: float


@dataclass(frozen=True, eq=False)
class DiagnosticsReport:
    """Everything the stability story says about one parameter point."""

    lyapunov: LyapunovEstimate
    any_log_moment: AnyLogMomentCheck
    rho_A: dict[int, float]
    rho_C: dict[int, float]
    leverage: Optional[LeverageReport]
    tail: Optional[TailReport]
    lambda_bound: Optional[float]
    moment_order: Optional[float]
    cramer_ok: Optional[bool]

    def to_dict(self) -> dict:
        out = {
            "lyapunov": {
                "estimate": self.lyapunov.estimate,
                "std_error": self.lyapunov.std_error,
                "method": self.lyapunov.method,
                "stationary": self.lyapunov.estimate < 0,
            },
            "any_log_moment": {
                "ok": self.any_log_moment.ok,
                "rho": self.any_log_moment.rho,
                "coeff_sum": self.any_log_moment.coeff_sum,
            },
            "rho_A": {str(m): v for m, v in self.rho_A.items()},
            "rho_C": {str(m): v for m, v in self.rho_C.items()},
            "lambda_bound": self.lambda_bound,
            "moment_order": self.moment_order,
            "cramer_ok": self.cramer_ok,
        }
        if self.leverage is not None:
            out["leverage"] = {
                "tau": self.leverage.tau,
                "covariance": self.leverage.covariance,
            }
        if self.tail is not None:
            out["tail"] = {
                "sigma2_index": self.tail.sigma2_index,
                "eps_index": self.tail.eps_index,
            }
        return out


def diagnose(
    params: LogGarchParams,
    dist: Optional[InnovationSpec] = None,
    sign_prob: Optional[float] = None,
    moments: tuple[int, ...] = (1, 2, 3),
    horizon: int = 10_000,
    reps: int = 50,
    seed: int = 0,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> DiagnosticsReport:
    """Assemble the full report; closed forms where they apply, None where not.

    ``dist`` may be omitted when only sign-driven quantities are wanted;
    ``sign_prob`` overrides the distribution's sign probability.
    """
    a = sign_prob if sign_prob is not None else (dist.sign_prob if dist else 0.5)
    first_order = params.p == 1 and params.q == 1
    if first_order:
        lyap = LyapunovEstimate(
            estimate=lyapunov_closed_11(params, a),
            std_error=0.0,
            method="closed-form",
        )
    else:
        lyap = lyapunov_mc(
            params, dist, horizon=horizon, reps=reps, seed=seed, sign_prob=a
        )

    rho_a: dict[int, float] = {}
    rho_c: dict[int, float] = {}
    for m in moments:
        try:
            rho_a[m] = spectral_radius(moment_matrix_A(params, m, a, dim_cap))
        except (CapExceededError, NotApplicableError):
            pass
        try:
            rho_c[m] = spectral_radius(moment_matrix_C(params, m, a, dim_cap))
        except (CapExceededError, NotApplicableError):
            pass

    leverage = None
    if dist is not None:
        try:
            leverage = leverage_covariance_11(params, dist)
        except NotApplicableError:
            pass

    tail = None
    if dist is not None and dist.tail_exponent is not None and math.isfinite(
        dist.tail_exponent
    ):
        try:
            si, ei = tail_index_11(params, dist.tail_exponent / 2.0)
            tail = TailReport(sigma2_index=si, eps_index=ei)
        except NotApplicableError:
            pass

    try:
        lam = compute_lambda(params)
    except NotApplicableError:
        lam = None

    order = None
    try:
        order, _ = moment_order_11(params, 1.0)
    except (NotApplicableError, InvalidInputError):
        pass

    return DiagnosticsReport(
        lyapunov=lyap,
        any_log_moment=check_any_log_moment(params),
        rho_A=rho_a,
        rho_C=rho_c,
        leverage=leverage,
        tail=tail,
        lambda_bound=lam,
        moment_order=order,
        cramer_ok=cramer_condition_catalog(dist) if dist is not None else None,
    )
