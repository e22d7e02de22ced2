"""End-to-end acceptance checks.

Eleven numbered criteria cover estimation accuracy, model selection,
stability diagnostics, gradient exactness, interval calibration, test size,
tail behavior, and robustness to the filter's startup choices, plus a
format check of the command line fit report. Each check prints a single
PASS/FAIL line; the collected lines are repeated at the end of the run.
"""

import json
import math
import re
import time

import numpy as np
import pytest

import volalab as v
from conftest import ACCEPTANCE_LINES
from volalab.cli import main as cli_main

# mean printed standard errors of the five reference fits, per component
SE_REF_LG = np.array([0.0032, 0.0038, 0.0032, 0.0040])
SE_REF_EG = np.array([0.0214, 0.0094, 0.0124, 0.0230])  # (omega, beta, gamma, delta)


def _report(num, label, ok, detail):
    line = f"[{num:>2}] {'PASS' if ok else 'FAIL'}  {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_01_loggarch_estimation_accuracy(theta0):
    start = time.perf_counter()
    study = v.run_replications(theta0, v.normal(), n=3344, reps=100, seed=1, wald=False)
    elapsed = time.perf_counter() - start
    bias = np.abs(study.mean_estimate() - theta0.as_vector())
    se = study.mean_se()
    se_ok = np.all((se >= SE_REF_LG / 1.5) & (se <= SE_REF_LG * 1.5))
    ok = bool(np.all(bias < 0.01) and se_ok and elapsed < 300.0)
    _report(
        1,
        "log-garch estimation accuracy",
        ok,
        f"max |mean - truth| = {bias.max():.4f} (< 0.01), "
        f"mean se = {np.array2string(se, precision=4)} vs refs +-50%, "
        f"{elapsed:.0f} s for 100 replications (< 300 s)",
    )


def test_02_egarch_estimation_accuracy(eg0):
    study = v.run_replications(eg0, v.normal(), n=3344, reps=100, seed=2, wald=False)
    bias = np.abs(study.mean_estimate() - eg0.as_vector())
    se = study.mean_se()
    se_ok = np.all((se >= SE_REF_EG / 1.5) & (se <= SE_REF_EG * 1.5))
    ok = bool(np.all(bias < 0.03) and se_ok)
    _report(
        2,
        "egarch estimation accuracy",
        ok,
        f"max |mean - truth| = {bias.max():.4f} (< 0.03), "
        f"mean se = {np.array2string(se, precision=4)} vs refs +-50%",
    )


def test_03_true_family_wins_the_likelihood(theta0, eg0):
    lg = v.run_replications(
        theta0, v.normal(), n=3344, reps=20, seed=3, wald=False, fit_both=True
    )
    eg = v.run_replications(
        eg0, v.normal(), n=3344, reps=20, seed=3, wald=False, fit_both=True
    )
    lg_wins = lg.winner_counts().get("log-garch", 0)
    eg_wins = eg.winner_counts().get("egarch", 0)
    ok = lg_wins >= 18 and eg_wins >= 16
    _report(
        3,
        "likelihood favors the true family",
        ok,
        f"log-garch truth {lg_wins}/20 (need >= 18), "
        f"egarch truth {eg_wins}/20 (need >= 16)",
    )


def test_04_lyapunov_monte_carlo_matches_the_closed_form():
    rng = np.random.default_rng(44)
    agree, total = 0, 200
    for i in range(total):
        while True:
            ap, am = rng.uniform(0.01, 0.3, size=2)
            b = rng.uniform(-0.5, 0.95)
            if abs(ap + b) >= 0.02 and abs(am + b) >= 0.02:
                break
        params = v.LogGarchParams(0.0, (ap,), (am,), (b,))
        closed = v.lyapunov_closed_11(params)
        mc = v.lyapunov_mc(
            params, horizon=3000, reps=40, discard=100, seed=i, sign_prob=0.5
        )
        if abs(mc.estimate - closed) <= 3.0 * mc.std_error:
            agree += 1
    ok = agree >= 0.95 * total
    _report(
        4,
        "monte carlo lyapunov exponent",
        ok,
        f"{agree}/{total} draws within 3 mc standard errors of the closed form "
        f"(need >= {int(0.95 * total)})",
    )


def test_05_all_moment_condition_equals_the_coefficient_sum():
    rng = np.random.default_rng(55)
    disagreements = 0
    for _ in range(10_000):
        r = int(rng.integers(1, 5))
        ap = rng.uniform(-0.6, 0.6, size=r)
        am = rng.uniform(-0.6, 0.6, size=r)
        b = rng.uniform(-0.6, 0.6, size=r)
        params = v.LogGarchParams(0.0, tuple(ap), tuple(am), tuple(b))
        rho = v.spectral_radius(v.companion_system(params).abs_sup())
        by_radius = rho < 1.0
        by_sum = float(np.maximum(np.abs(ap + b), np.abs(am + b)).sum()) < 1.0
        disagreements += by_radius != by_sum
    ok = disagreements == 0
    _report(
        5,
        "sup-matrix radius vs coefficient sum",
        ok,
        f"{disagreements} disagreements on 10000 draws with up to 4 lags (need 0)",
    )


def _mc_leverage(params, seed, n=1_000_000, batches=100):
    series, path = v.simulate_log_garch(
        params, v.normal(), v.SimConfig(n=n, seed=seed)
    )
    ls = path.log_sigma2
    eta = series.values * np.exp(-0.5 * ls)
    m = (n - 1) // batches * batches
    x = eta[:m].reshape(batches, -1)
    y = ls[1 : 1 + m].reshape(batches, -1)
    covs = (x * y).mean(axis=1) - x.mean(axis=1) * y.mean(axis=1)
    return float(covs.mean()), float(covs.std(ddof=1) / math.sqrt(batches))


def test_06_leverage_covariance_formula():
    rng = np.random.default_rng(66)
    misses = []
    for i in range(20):
        while True:
            ap, am = rng.uniform(0.01, 0.25, size=2)
            b = rng.uniform(0.0, 0.9)
            if abs(ap - am) >= 0.02 and b + 0.5 * (ap + am) <= 0.95:
                break
        omega = rng.uniform(-0.2, 0.2)
        params = v.LogGarchParams(omega, (ap,), (am,), (b,))
        want = v.leverage_covariance_11(params, v.normal()).covariance
        got, se = _mc_leverage(params, seed=600 + i)
        if abs(got - want) > 3.0 * se:
            misses.append((i, (got - want) / se))
    symmetric_zero = all(
        v.leverage_covariance_11(
            v.LogGarchParams(0.1, (a,), (a,), (b,)), v.normal()
        ).covariance
        == 0.0
        for a, b in [(0.027, 0.9), (0.1, 0.5), (0.2, 0.0)]
    )
    ok = not misses and symmetric_zero
    _report(
        6,
        "leverage covariance",
        ok,
        f"{20 - len(misses)}/20 asymmetric draws within 3 se at n = 10^6 "
        f"(need 20){'' if not misses else ', z-scores ' + str(misses)}; "
        f"symmetric sets exactly zero: {symmetric_zero}",
    )


def _fd_path_error(params, values, rebuild, run_filter):
    grad = v.grad_log_sigma2(params, values)
    vec = params.as_vector()
    h = 1e-6
    worst = 0.0
    for i in range(vec.size):
        up, dn = vec.copy(), vec.copy()
        up[i] += h
        dn[i] -= h
        fd = (run_filter(rebuild(up)) - run_filter(rebuild(dn))) / (2.0 * h)
        scale = np.maximum(np.abs(fd), 1.0)
        worst = max(worst, float(np.max(np.abs(grad[:, i] - fd) / scale)))
    return worst


def test_07_analytic_gradients_match_finite_differences(sample, eg_sample):
    lg_values = sample[0].values[:400]
    eg_values = eg_sample[0].values[:400]
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(20):
        params = v.LogGarchParams(
            rng.uniform(-0.3, 0.3),
            (rng.uniform(0.01, 0.3),),
            (rng.uniform(0.01, 0.3),),
            (rng.uniform(-0.5, 0.9),),
        )
        worst = max(
            worst,
            _fd_path_error(
                params,
                lg_values,
                lambda x: v.LogGarchParams.from_vector(x, 1, 1),
                lambda p: v.filter_log_garch(p, lg_values).log_sigma2,
            ),
        )
    for _ in range(20):
        g = rng.uniform(-0.15, 0.15)
        params = v.EgarchParams(
            rng.uniform(-0.5, 0.0),
            (rng.uniform(0.1, 0.85),),
            (g,),
            (abs(g) + rng.uniform(0.05, 0.25),),
        )
        worst = max(
            worst,
            _fd_path_error(
                params,
                eg_values,
                lambda x: v.EgarchParams.from_vector(x, 1, 1),
                lambda p: v.filter_egarch(p, eg_values)[0].log_sigma2,
            ),
        )
    ok = worst < 1e-4
    _report(
        7,
        "analytic path gradients",
        ok,
        f"worst relative error {worst:.2e} over 20 random points per family "
        f"(need < 1e-4)",
    )


def test_08_confidence_interval_coverage(theta0):
    study = v.run_replications(theta0, v.normal(), n=3344, reps=500, seed=8, wald=False)
    cov = study.coverage(0.95)
    ok = bool(np.all((cov >= 0.92) & (cov <= 0.98)))
    _report(
        8,
        "95% interval coverage",
        ok,
        f"per-component coverage {np.array2string(cov, precision=3)} over 500 "
        f"replications (need within [0.92, 0.98])",
    )


def test_09_symmetry_test_size():
    truth = v.LogGarchParams(0.024, (0.0215,), (0.0215,), (0.971,))
    study = v.run_replications(truth, v.normal(), n=3344, reps=500, seed=9)
    rate = study.rejection_rate(0.05)
    ok = 0.025 <= rate <= 0.085
    _report(
        9,
        "symmetry test size",
        ok,
        f"rejection rate {rate:.3f} at nominal 5% over 500 replications "
        f"(need within [0.025, 0.085])",
    )


def test_10_heavy_tail_index_passes_through(theta0):
    series, _ = v.simulate_log_garch(
        theta0, v.student_t(6.0), v.SimConfig(n=1_000_000, seed=10)
    )
    est = v.hill_estimate(np.abs(series.values))
    ok = abs(est.index - 6.0) <= 1.5
    _report(
        10,
        "tail index of the returns",
        ok,
        f"hill estimate {est.index:.2f} with k = {est.k} on t(6) innovations "
        f"(need within 1.5 of 6)",
    )


def test_11_floor_and_init_robustness(sample):
    series, _ = sample
    le2 = 2.0 * np.log(np.maximum(np.abs(series.values), 1e-8))
    eps2 = float(np.exp(le2.mean() - v.normal().mean_log_sq))
    matched = v.InitPolicy(mode="fixed", eps2=eps2, log_sigma2=math.log(eps2))
    estimates = [
        v.fit_log_garch(
            series, options=v.FitOptions(floor=floor, init=init)
        ).params.as_vector()
        for floor in (1e-6, 1e-8, 1e-10)
        for init in (v.InitPolicy(), matched)
    ]
    stack = np.stack(estimates)
    spread = float(np.max(stack.max(axis=0) - stack.min(axis=0)))
    ok = spread < 1e-3
    _report(
        11,
        "floor and startup robustness",
        ok,
        f"max entrywise spread {spread:.2e} over 3 floors x 2 presample "
        f"policies (need < 1e-3)",
    )


def test_12_cli_fit_report_format(tmp_path, capsys):
    csv = tmp_path / "sample.csv"
    code = cli_main(
        [
            "simulate",
            "--family",
            "log-garch",
            "--omega",
            "0.024",
            "--alpha-pos",
            "0.027",
            "--alpha-neg",
            "0.016",
            "--beta",
            "0.971",
            "--n",
            "3344",
            "--seed",
            "12",
            "--out",
            str(csv),
        ]
    )
    assert code == 0
    report_path = tmp_path / "fit.json"
    code = cli_main(
        [
            "fit",
            "--family",
            "log-garch",
            "--input",
            str(csv),
            "--out",
            str(report_path),
        ]
    )
    out = capsys.readouterr().out
    with capsys.disabled():
        rows = re.findall(r"^ *(\w+) = +-?\d+\.\d{5} +\(se \d+\.\d{4}\)$", out, re.M)
        report = json.loads(report_path.read_text())
        ok = (
            code == 0
            and rows == ["omega", "alpha_pos_1", "alpha_neg_1", "beta_1"]
            and re.search(r"^log-likelihood -?\d+\.\d+, converged True$", out, re.M)
            is not None
            and "wald_symmetry" in report
        )
        _report(
            12,
            "cli fit emits the reference table shape",
            ok,
            f"{len(rows)} 'name = value (se ...)' rows plus a log-likelihood "
            f"line and a symmetry test in the report",
        )
