"""Timing comparison of the compiled and pure-Python recursion kernels.

Both backends are imported directly, bypassing the import-time selection,
so the comparison runs even when the package fell back to pure Python.
"""

from __future__ import annotations

import time

import numpy as np

from . import _recursions_python as pure_backend
from ._kernels import backend_name
from ._rng import stream

try:
    from . import _recursions as compiled_backend
except ImportError:
    compiled_backend = None

__all__ = ["run_benchmark", "format_table"]

_THETA = (0.024, (0.027,), (0.016,), (0.971,))


def _inputs(n: int):
    rng = stream(0, 9000)
    eta = rng.standard_normal(n)
    omega, ap, am, b = _THETA
    ap_a, am_a, b_a = np.array(ap), np.array(am), np.array(b)
    ls_sim = np.empty(1 + n)
    ls_sim[0] = -3.9
    log_eta2 = np.log(eta * eta)
    is_pos = (eta > 0).astype(np.uint8)
    pure_backend.loggarch_simulate(
        omega, ap_a, am_a, b_a, np.concatenate([[0.0], log_eta2]),
        np.concatenate([[1], is_pos]).astype(np.uint8), ls_sim, 1,
    )
    eps = np.exp(0.5 * ls_sim[1:]) * eta

    le2 = np.empty(1 + n)
    le2[0] = np.log(np.mean(eps * eps))
    le2[1:] = 2.0 * np.log(np.maximum(np.abs(eps), 1e-8))
    code = np.empty(1 + n, dtype=np.uint8)
    code[0] = 2
    code[1:] = np.where(eps > 0, 1, 0).astype(np.uint8)
    pre_ls = np.array([le2[0]])
    return eps, eta, le2, code, pre_ls


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_benchmark(n: int = 3344, repeats: int = 20, horizon: int = 10000) -> dict:
    """Time each kernel on realistic inputs; seconds are best-of-``repeats``."""
    eps, eta, le2, code, pre_ls = _inputs(n)
    omega, ap, am, b = _THETA
    ap_a, am_a, b_a = np.array(ap), np.array(am), np.array(b)
    ls = np.empty(n)
    grad4 = np.empty((n, 4))
    eta_out = np.empty(n)
    eg = (-0.204, np.array([0.963]), np.array([-0.012]), np.array([0.227]))
    cp = np.array([[abs(0.027 + 0.971)]])
    cm = np.array([[abs(0.016 + 0.971)]])
    signs = (stream(0, 9001).random(horizon) < 0.5).astype(np.uint8)

    cases = {
        "loggarch_filter": lambda be: be.loggarch_filter(
            omega, ap_a, am_a, b_a, le2, code, pre_ls, ls
        ),
        "loggarch_filter_grad": lambda be: be.loggarch_filter_grad(
            omega, ap_a, am_a, b_a, le2, code, pre_ls, ls, grad4
        ),
        "egarch_filter": lambda be: be.egarch_filter(
            eg[0], eg[1], eg[2], eg[3], eps, pre_ls, ls, eta_out
        ),
        "egarch_filter_grad": lambda be: be.egarch_filter_grad(
            eg[0], eg[1], eg[2], eg[3], eps, pre_ls, ls, eta_out, grad4
        ),
        "lyapunov_accumulate": lambda be: be.lyapunov_accumulate(cp, cm, signs, 100),
    }

    backends = [("pure-python", pure_backend)]
    if compiled_backend is not None:
        backends.append(("compiled", compiled_backend))

    rows = []
    for kernel, call in cases.items():
        timed = {}
        for label, be in backends:
            timed[label] = _time(lambda be=be: call(be), repeats)
        row = {"kernel": kernel, **{f"{k}_s": v for k, v in timed.items()}}
        if "compiled" in timed and timed["compiled"] > 0:
            row["speedup"] = timed["pure-python"] / timed["compiled"]
        rows.append(row)
    return {
        "n": n,
        "repeats": repeats,
        "active_backend": backend_name(),
        "compiled_available": compiled_backend is not None,
        "rows": rows,
    }


def format_table(results: dict) -> str:
    lines = [
        f"kernel timings, n = {results['n']}, best of {results['repeats']} runs",
        f"active backend: {results['active_backend']}",
    ]
    if not results["compiled_available"]:
        lines.append("compiled backend not importable; timing pure python only")
    header = f"{'kernel':<22}{'pure-python':>14}{'compiled':>14}{'speedup':>10}"
    lines.append(header)
    lines.append("-" * len(header))
    for row in results["rows"]:
        pure_s = row["pure-python_s"]
        comp = row.get("compiled_s")
        comp_txt = f"{comp * 1e6:>11.1f} us" if comp is not None else f"{'-':>14}"
        speed = row.get("speedup")
        speed_txt = f"{speed:>9.1f}x" if speed is not None else f"{'-':>10}"
        lines.append(
            f"{row['kernel']:<22}{pure_s * 1e6:>11.1f} us{comp_txt}{speed_txt}"
        )
    return "\n".join(lines)
