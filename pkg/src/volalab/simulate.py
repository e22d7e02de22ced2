"""Exact simulation of the supported recursions.

Paths are generated from iid innovations with a discarded burn-in, a
counter-based RNG stream (same seed, same bytes, regardless of scheduling)
and an explosion guard at |log sigma^2| = 700. The duration model shares the
log-GARCH recursion: a positive duration plays the squared return, the trade
direction plays its sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._kernels import rec
from ._rng import stream
from .errors import DegeneracyError, ExplosionError, InvalidInputError
from .innovations import InnovationSpec
from .model import EgarchParams, LogGarchParams, Series, VolPath

__all__ = [
    "SimConfig",
    "AcdSample",
    "ImpactCurves",
    "simulate_log_garch",
    "simulate_egarch",
    "simulate_log_acd",
    "impact_curves",
    "matched_impact_trio",
]


@dataclass(frozen=True)
class SimConfig:
    """Length, burn-in, seed and optional fixed starting log-variance.

    ``substream`` selects an independent stream under the same seed; batch
    drivers give each replication its own substream.
    """

    n: int
    burn_in: int = 1000
    seed: int = 0
    substream: int = 0
    initial_log_sigma2: Optional[float] = None

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError(f"n must be positive, got {self.n}")
        if self.burn_in < 0:
            raise InvalidInputError(f"burn_in must be >= 0, got {self.burn_in}")


def _loggarch_start(params: LogGarchParams, dist: InnovationSpec) -> float:
    """Rough stationary mean of log sigma^2, or 0 when not available."""
    denom = 1.0 - sum(params.beta) - 0.5 * (sum(params.alpha_pos) + sum(params.alpha_neg))
    if dist.mean_log_sq is None or denom < 0.05:
        return 0.0
    abar = 0.5 * (sum(params.alpha_pos) + sum(params.alpha_neg))
    return (params.omega + abar * dist.mean_log_sq) / denom


def _egarch_start(params: EgarchParams, dist: InnovationSpec) -> float:
    denom = 1.0 - sum(params.beta)
    if dist.abs_mean is None or denom < 0.05:
        return 0.0
    return (params.omega + sum(params.delta) * dist.abs_mean) / denom


def _raise_explosion(status: int, ls: np.ndarray, offset: int, what: str):
    if status < 0:
        return
    step = status - offset
    side = "exceeded" if ls[status] > 0 else "underflowed"
    raise ExplosionError(
        f"{what} {side} the representable range at step {step} "
        f"(negative steps are burn-in; log sigma^2 = {ls[status]:.3g})",
        step=step,
    )


def simulate_log_garch(
    params: LogGarchParams,
    dist: InnovationSpec,
    config: SimConfig,
) -> tuple[Series, VolPath]:
    """Simulate returns and the exact log-variance path."""
    rng = stream(config.seed, config.substream)
    m = max(params.p, params.q)
    total = config.burn_in + config.n + m
    eta = dist.draw(rng, total)
    zero = np.flatnonzero(eta == 0.0)
    if zero.size:
        raise DegeneracyError(
            f"innovation draw is exactly zero at step {int(zero[0]) - config.burn_in - m}",
            step=int(zero[0]),
        )
    start_val = (
        config.initial_log_sigma2
        if config.initial_log_sigma2 is not None
        else _loggarch_start(params, dist)
    )
    ls = np.empty(total)
    ls[:m] = start_val
    status = rec.loggarch_simulate(
        params.omega,
        np.asarray(params.alpha_pos),
        np.asarray(params.alpha_neg),
        np.asarray(params.beta),
        np.log(eta * eta),
        (eta > 0).astype(np.uint8),
        ls,
        m,
    )
    _raise_explosion(status, ls, config.burn_in + m, "log-GARCH simulation")
    tail = slice(total - config.n, total)
    eps = np.exp(0.5 * ls[tail]) * eta[tail]
    return Series(eps), VolPath(log_sigma2=ls[tail].copy(), origin="generative")


def simulate_egarch(
    params: EgarchParams,
    dist: InnovationSpec,
    config: SimConfig,
) -> tuple[Series, VolPath]:
    """Simulate returns and the exact log-variance path."""
    rng = stream(config.seed, config.substream)
    m = max(params.p, params.num_lags)
    total = config.burn_in + config.n + m
    eta = dist.draw(rng, total)
    start_val = (
        config.initial_log_sigma2
        if config.initial_log_sigma2 is not None
        else _egarch_start(params, dist)
    )
    ls = np.empty(total)
    ls[:m] = start_val
    status = rec.egarch_simulate(
        params.omega,
        np.asarray(params.beta),
        np.asarray(params.gamma),
        np.asarray(params.delta),
        eta,
        ls,
        m,
    )
    _raise_explosion(status, ls, config.burn_in + m, "EGARCH simulation")
    tail = slice(total - config.n, total)
    eps = np.exp(0.5 * ls[tail]) * eta[tail]
    return Series(eps), VolPath(log_sigma2=ls[tail].copy(), origin="generative")


@dataclass(frozen=True, eq=False)
class AcdSample:
    """Simulated durations, trade directions (+/-1) and log expected durations."""

    durations: Series
    directions: np.ndarray
    log_psi: np.ndarray


def simulate_log_acd(
    params: LogGarchParams,
    config: SimConfig,
    dir_prob: float = 0.5,
    z_sampler: Optional[Callable[[np.random.Generator, int], np.ndarray]] = None,
) -> AcdSample:
    """Simulate the logarithmic duration model.

    Durations are x_i = psi_i z_i with iid positive unit-mean z (unit
    exponential by default) and log psi following the log-GARCH recursion
    with sign gates read off the iid +/-1 direction sequence.
    """
    if not 0.0 < dir_prob < 1.0:
        raise InvalidInputError(f"dir_prob must be in (0, 1), got {dir_prob}")
    rng = stream(config.seed, config.substream)
    m = max(params.p, params.q)
    total = config.burn_in + config.n + m
    z = rng.exponential(1.0, total) if z_sampler is None else np.asarray(
        z_sampler(rng, total), dtype=np.float64
    )
    if z.shape != (total,):
        raise InvalidInputError(f"z sampler returned shape {z.shape}, expected ({total},)")
    if not (z > 0).all():
        bad = int(np.flatnonzero(~(z > 0))[0])
        raise InvalidInputError(f"duration innovations must be positive (index {bad})")
    up = rng.random(total) < dir_prob
    start_val = (
        config.initial_log_sigma2
        if config.initial_log_sigma2 is not None
        else 0.0
    )
    ls = np.empty(total)
    ls[:m] = start_val
    status = rec.loggarch_simulate(
        params.omega,
        np.asarray(params.alpha_pos),
        np.asarray(params.alpha_neg),
        np.asarray(params.beta),
        np.log(z),
        up.astype(np.uint8),
        ls,
        m,
    )
    _raise_explosion(status, ls, config.burn_in + m, "duration simulation")
    tail = slice(total - config.n, total)
    durations = np.exp(ls[tail]) * z[tail]
    directions = np.where(up[tail], 1, -1).astype(np.int8)
    return AcdSample(
        durations=Series(durations),
        directions=directions,
        log_psi=ls[tail].copy(),
    )


@dataclass(frozen=True, eq=False)
class ImpactCurves:
    """Responses of the three first-order recursions to one shock sequence.

    All paths are in log-variance units; entry t is the state after
    absorbing shocks[0..t].
    """

    shocks: np.ndarray
    log_garch: np.ndarray
    egarch: np.ndarray
    garch: np.ndarray


def matched_impact_trio(
    target_variance: float = 0.02,
) -> tuple[LogGarchParams, EgarchParams, tuple[float, float, float]]:
    """Default comparison models sharing one long-run variance.

    Calibrated so that a constant unit squared shock holds every model at
    ``target_variance``. The GARCH comparator is the textbook persistent
    (0.09, 0.88) pair with the intercept solved from the target.
    """
    if not target_variance > 0:
        raise InvalidInputError(f"target_variance must be positive, got {target_variance}")
    level = math.log(target_variance)
    lg = LogGarchParams(
        omega=level * (1.0 - 0.0215 - 0.971),
        alpha_pos=(0.0215,),
        alpha_neg=(0.0215,),
        beta=(0.971,),
    )
    eg = EgarchParams(
        omega=level * (1.0 - 0.963) - 0.227,
        beta=(0.963,),
        gamma=(0.0,),
        delta=(0.227,),
    )
    garch = (target_variance * (1.0 - 0.09 - 0.88), 0.09, 0.88)
    return lg, eg, garch


def impact_curves(
    shocks,
    log_garch: Optional[LogGarchParams] = None,
    egarch: Optional[EgarchParams] = None,
    garch: Optional[tuple[float, float, float]] = None,
    target_variance: float = 0.02,
) -> ImpactCurves:
    """Drive all three recursions with one shock sequence from matched states.

    Each model starts at its fixed point under constant unit shocks (the
    matched long-run level). First-order models only.
    """
    shocks = np.asarray(shocks, dtype=np.float64)
    if shocks.ndim != 1 or shocks.size == 0:
        raise InvalidInputError("shocks must be a non-empty one-dimensional array")
    if not np.isfinite(shocks).all() or (shocks == 0).any():
        raise InvalidInputError("shocks must be finite and non-zero")
    lg_d, eg_d, g_d = matched_impact_trio(target_variance)
    lg = log_garch if log_garch is not None else lg_d
    eg = egarch if egarch is not None else eg_d
    g_om, g_al, g_be = garch if garch is not None else g_d
    if lg.p != 1 or lg.q != 1:
        raise InvalidInputError("impact curves need a first-order log-GARCH")
    if eg.p != 1 or eg.num_lags != 1:
        raise InvalidInputError("impact curves need a first-order EGARCH")

    n = shocks.size
    lg_fix = lg.omega / (1.0 - lg.alpha_pos[0] - lg.beta[0])
    eg_fix = (eg.omega + eg.gamma[0] + eg.delta[0]) / (1.0 - eg.beta[0])
    g_fix = g_om / (1.0 - g_al - g_be)

    lg_path = np.empty(n)
    eg_path = np.empty(n)
    g_path = np.empty(n)
    ls, le, s2 = lg_fix, eg_fix, g_fix
    for t in range(n):
        sh = shocks[t]
        coef = lg.alpha_pos[0] if sh > 0 else lg.alpha_neg[0]
        ls = lg.omega + coef * (ls + math.log(sh * sh)) + lg.beta[0] * ls
        le = eg.omega + eg.beta[0] * le + eg.gamma[0] * sh + eg.delta[0] * abs(sh)
        s2 = g_om + g_al * s2 * sh * sh + g_be * s2
        lg_path[t] = ls
        eg_path[t] = le
        g_path[t] = math.log(s2)
    return ImpactCurves(shocks=shocks, log_garch=lg_path, egarch=eg_path, garch=g_path)
