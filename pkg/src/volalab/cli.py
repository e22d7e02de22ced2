"""Command line interface.

Subcommands: simulate, fit, diagnose, montecarlo, impact, replay, bench.
Every run that writes an artifact also writes a manifest recording the
fully resolved argument list; ``replay`` re-runs a manifest and reproduces
the artifact bytes exactly. Exit codes: 0 success, 2 bad input or usage,
3 a recursion left the representable range, 4 estimation failure or
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from . import __version__
from .bench import format_table, run_benchmark
from .data_io import FLOAT_FORMAT, load_series_csv, write_series_csv
from .diagnostics import diagnose
from .errors import (
    EstimationError,
    ExplosionError,
    InvalidInputError,
    VolalabError,
)
from .estimate import FitOptions, fit_egarch, fit_log_garch
from .inference import compare_models, wald_symmetry
from .innovations import InnovationSpec, normal, student_t, two_point
from .model import EgarchParams, InitPolicy, LogGarchParams, Series
from .montecarlo import run_replications
from .simulate import (
    SimConfig,
    impact_curves,
    simulate_egarch,
    simulate_log_acd,
    simulate_log_garch,
)

__all__ = ["main"]


def _float_list(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _column_arg(text: str) -> Union[str, int]:
    try:
        return int(text)
    except ValueError:
        return text


def _resolve_seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    return int(os.environ.get("VOLALAB_SEED", "0"))


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _dump_json(obj: dict, path: Optional[str]) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _replay_argv(argv: list[str], seed: Optional[int]) -> list[str]:
    if seed is None or "--seed" in argv:
        return list(argv)
    return list(argv) + ["--seed", str(seed)]


def _write_manifest(
    path: str,
    command: str,
    argv: list[str],
    seed: Optional[int],
    artifacts: list[str],
) -> None:
    _dump_json(
        {
            "schema": "volalab/manifest/v1",
            "version": __version__,
            "command": command,
            "argv": _replay_argv(argv, seed),
            "seed": seed,
            "artifacts": artifacts,
        },
        path,
    )


def _manifest_path(ns) -> str:
    return ns.manifest if ns.manifest else f"{ns.out}.manifest.json"


def _dist_from(ns) -> InnovationSpec:
    if ns.dist == "normal":
        return normal()
    if ns.dist == "t":
        if ns.df is None:
            raise InvalidInputError("--dist t needs --df")
        return student_t(ns.df)
    return two_point()


def _lg_params(ns) -> LogGarchParams:
    return LogGarchParams(
        omega=ns.omega,
        alpha_pos=ns.alpha_pos,
        alpha_neg=ns.alpha_neg,
        beta=ns.beta,
    )


def _eg_params(ns) -> EgarchParams:
    return EgarchParams(omega=ns.omega, beta=ns.beta, gamma=ns.gamma, delta=ns.delta)


def _add_dist_args(sub):
    sub.add_argument("--dist", choices=["normal", "t", "two-point"], default="normal")
    sub.add_argument("--df", type=float, default=None, help="degrees of freedom for --dist t")


def _add_lg_param_args(sub):
    sub.add_argument("--omega", type=float, required=True)
    sub.add_argument("--alpha-pos", type=_float_list, default=())
    sub.add_argument("--alpha-neg", type=_float_list, default=())
    sub.add_argument("--beta", type=_float_list, default=())


def _cmd_simulate(ns, argv) -> int:
    seed = _resolve_seed(ns.seed)
    config = SimConfig(n=ns.n, burn_in=ns.burn_in, seed=seed)
    artifacts = [ns.out]
    if ns.family == "egarch":
        params = _eg_params(ns)
        series, vol = simulate_egarch(params, _dist_from(ns), config)
        write_series_csv(ns.out, series)
        vol_values = vol.log_sigma2
    elif ns.family == "log-garch":
        params = _lg_params(ns)
        series, vol = simulate_log_garch(params, _dist_from(ns), config)
        write_series_csv(ns.out, series)
        vol_values = vol.log_sigma2
    else:
        params = _lg_params(ns)
        sample = simulate_log_acd(params, config, dir_prob=ns.dir_prob)
        pd.DataFrame(
            {
                "duration": sample.durations.values,
                "direction": sample.directions.astype(int),
            }
        ).to_csv(ns.out, index=False, float_format=FLOAT_FORMAT)
        vol_values = sample.log_psi
    if ns.vol_out:
        write_series_csv(ns.vol_out, Series(vol_values), column="log_sigma2")
        artifacts.append(ns.vol_out)
    _write_manifest(_manifest_path(ns), "simulate", argv, seed, artifacts)
    print(f"wrote {ns.n} observations to {ns.out}")
    return 0


def _cmd_fit(ns, argv) -> int:
    seed = _resolve_seed(ns.seed)
    series = load_series_csv(ns.input, column=ns.column, date_column=ns.date_column)
    if ns.init == "fixed":
        if ns.init_eps2 is None or ns.init_log_sigma2 is None:
            raise InvalidInputError(
                "--init fixed needs --init-eps2 and --init-log-sigma2"
            )
        init = InitPolicy("fixed", eps2=ns.init_eps2, log_sigma2=ns.init_log_sigma2)
    else:
        init = InitPolicy()
    options = FitOptions(
        floor=ns.floor,
        r0=ns.r0,
        restarts=ns.restarts,
        init=init,
        seed=seed,
        enforce_invertibility=not ns.no_invertibility,
    )
    if ns.family == "log-garch":
        fit = fit_log_garch(series, ns.p, ns.q, options)
    else:
        fit = fit_egarch(series, ns.p, ns.lags, options)

    report = {"schema": "volalab/fit/v1", **fit.to_dict()}
    try:
        report["wald_symmetry"] = wald_symmetry(fit).to_dict()
    except VolalabError:
        pass
    if fit.diagnostics is not None:
        report["diagnostics"] = fit.diagnostics.to_dict()
    if ns.compare:
        if ns.family == "log-garch":
            rival = fit_egarch(series, max(ns.p, 1), max(ns.q, 1), options)
        else:
            rival = fit_log_garch(series, max(ns.p, 1), max(ns.lags, 1), options)
        report["rival"] = rival.to_dict()
        report["comparison"] = compare_models(fit, rival).to_dict()

    _dump_json(report, ns.out)
    if ns.out:
        _write_manifest(_manifest_path(ns), "fit", argv, seed, [ns.out])
        for name, value in zip(fit.names, fit.params.as_vector()):
            se = "n/a"
            if fit.se is not None:
                se = f"{fit.se[fit.names.index(name)]:.4f}"
            print(f"{name:>12} = {value: .5f}  (se {se})")
        print(f"log-likelihood {fit.loglik:.6f}, converged {fit.converged}")
    if not fit.converged:
        print("warning: optimizer did not report convergence", file=sys.stderr)
        return 4
    return 0


def _cmd_diagnose(ns, argv) -> int:
    seed = _resolve_seed(ns.seed)
    params = _lg_params(ns)
    dist = _dist_from(ns) if ns.with_dist else None
    report = diagnose(
        params,
        dist=dist,
        sign_prob=ns.sign_prob,
        moments=tuple(int(m) for m in ns.moments),
        horizon=ns.horizon,
        reps=ns.reps,
        seed=seed,
    )
    payload = {
        "schema": "volalab/diagnostics/v1",
        "params": {
            "omega": params.omega,
            "alpha_pos": list(params.alpha_pos),
            "alpha_neg": list(params.alpha_neg),
            "beta": list(params.beta),
        },
        **report.to_dict(),
    }
    _dump_json(payload, ns.out)
    if ns.out:
        _write_manifest(_manifest_path(ns), "diagnose", argv, seed, [ns.out])
        state = "stationary" if report.lyapunov.estimate < 0 else "non-stationary"
        print(
            f"lyapunov {report.lyapunov.estimate:.6f} ({report.lyapunov.method}): {state}"
        )
    return 0


def _cmd_montecarlo(ns, argv) -> int:
    seed = _resolve_seed(ns.seed)
    if ns.family == "log-garch":
        truth = _lg_params(ns)
    else:
        truth = _eg_params(ns)
    options = FitOptions(restarts=ns.restarts, seed=seed)
    result = run_replications(
        truth,
        _dist_from(ns),
        n=ns.n,
        reps=ns.reps,
        seed=seed,
        burn_in=ns.burn_in,
        jobs=ns.jobs,
        fit_both=ns.both,
        wald=not ns.no_wald,
        options=options,
    )
    payload = {"schema": "volalab/study/v1", **result.summary()}
    _dump_json(payload, ns.out)
    if ns.out:
        _write_manifest(_manifest_path(ns), "montecarlo", argv, seed, [ns.out])
        print(
            f"{result.reps} replications, {int(result.ok.sum())} succeeded, "
            f"{len(result.failures)} failed"
        )
    return 0


_IMPACT_SHOCK_POS = 10


def _impact_shocks(scenario: str, steps: int) -> np.ndarray:
    if steps <= _IMPACT_SHOCK_POS:
        raise InvalidInputError(f"--steps must exceed {_IMPACT_SHOCK_POS}")
    if scenario == "flat":
        return np.ones(steps)
    if scenario == "micro":
        shocks = np.ones(steps)
        shocks[_IMPACT_SHOCK_POS] = 1e-4
        return shocks
    shocks = np.full(steps, 0.999)
    shocks[_IMPACT_SHOCK_POS] = 5.0
    return shocks


def _cmd_impact(ns, argv) -> int:
    shocks = _impact_shocks(ns.scenario, ns.steps)
    curves = impact_curves(shocks, target_variance=ns.target_variance)
    pd.DataFrame(
        {
            "step": np.arange(shocks.size),
            "shock": curves.shocks,
            "log_garch": curves.log_garch,
            "egarch": curves.egarch,
            "garch": curves.garch,
        }
    ).to_csv(ns.out, index=False, float_format=FLOAT_FORMAT)
    _write_manifest(_manifest_path(ns), "impact", argv, None, [ns.out])
    print(f"wrote {shocks.size} impact steps to {ns.out}")
    return 0


def _cmd_replay(ns, argv) -> int:
    data = json.loads(Path(ns.manifest_file).read_text())
    if data.get("schema") != "volalab/manifest/v1":
        raise InvalidInputError(
            f"{ns.manifest_file}: not a manifest (schema {data.get('schema')!r})"
        )
    stored = data.get("argv")
    if not isinstance(stored, list) or not all(isinstance(s, str) for s in stored):
        raise InvalidInputError(f"{ns.manifest_file}: manifest argv is malformed")
    print(f"replaying: volalab {' '.join(stored)}")
    return main(stored)


def _cmd_bench(ns, argv) -> int:
    results = run_benchmark(n=ns.n, repeats=ns.repeats)
    if ns.json:
        _dump_json(results, None)
    else:
        print(format_table(results))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="volalab",
        description="Sign-asymmetric log volatility models: simulate, fit, diagnose.",
    )
    parser.add_argument(
        "--version", action="version", version=f"volalab {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate a model and write returns CSV")
    sim.add_argument("--family", choices=["log-garch", "egarch", "log-acd"], required=True)
    sim.add_argument("--omega", type=float, required=True)
    sim.add_argument("--alpha-pos", type=_float_list, default=())
    sim.add_argument("--alpha-neg", type=_float_list, default=())
    sim.add_argument("--beta", type=_float_list, default=())
    sim.add_argument("--gamma", type=_float_list, default=())
    sim.add_argument("--delta", type=_float_list, default=())
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--burn-in", type=int, default=1000)
    sim.add_argument("--dir-prob", type=float, default=0.5, help="log-acd up-move probability")
    _add_dist_args(sim)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", required=True)
    sim.add_argument("--vol-out", default=None, help="also write the log-variance path")
    sim.add_argument("--manifest", default=None)
    sim.set_defaults(func=_cmd_simulate)

    fit = sub.add_parser("fit", help="fit a model to a CSV series")
    fit.add_argument("--family", choices=["log-garch", "egarch"], required=True)
    fit.add_argument("--input", required=True)
    fit.add_argument("--column", type=_column_arg, default="value")
    fit.add_argument("--date-column", type=_column_arg, default=None)
    fit.add_argument("--p", type=int, default=1)
    fit.add_argument("--q", type=int, default=1, help="log-garch shock lags")
    fit.add_argument("--lags", type=int, default=1, help="egarch shock lags")
    fit.add_argument("--floor", type=float, default=1e-8)
    fit.add_argument("--r0", type=int, default=None)
    fit.add_argument("--restarts", type=int, default=4)
    fit.add_argument("--init", choices=["sample-variance", "fixed"], default="sample-variance")
    fit.add_argument("--init-eps2", type=float, default=None)
    fit.add_argument("--init-log-sigma2", type=float, default=None)
    fit.add_argument(
        "--no-invertibility",
        action="store_true",
        help="drop the egarch empirical contraction constraint",
    )
    fit.add_argument("--compare", action="store_true", help="also fit the rival family")
    fit.add_argument("--seed", type=int, default=None)
    fit.add_argument("--out", default=None, help="report JSON path (default stdout)")
    fit.add_argument("--manifest", default=None)
    fit.set_defaults(func=_cmd_fit)

    diag = sub.add_parser("diagnose", help="stability report for log-garch parameters")
    _add_lg_param_args(diag)
    diag.add_argument("--sign-prob", type=float, default=None)
    diag.add_argument("--moments", type=_float_list, default=(1.0, 2.0, 3.0))
    diag.add_argument("--horizon", type=int, default=10000)
    diag.add_argument("--reps", type=int, default=50)
    diag.add_argument(
        "--with-dist",
        action="store_true",
        help="include distribution-dependent diagnostics",
    )
    _add_dist_args(diag)
    diag.add_argument("--seed", type=int, default=None)
    diag.add_argument("--out", default=None)
    diag.add_argument("--manifest", default=None)
    diag.set_defaults(func=_cmd_diagnose)

    mc = sub.add_parser("montecarlo", help="replicated simulate-then-fit study")
    mc.add_argument("--family", choices=["log-garch", "egarch"], required=True)
    mc.add_argument("--omega", type=float, required=True)
    mc.add_argument("--alpha-pos", type=_float_list, default=())
    mc.add_argument("--alpha-neg", type=_float_list, default=())
    mc.add_argument("--beta", type=_float_list, default=())
    mc.add_argument("--gamma", type=_float_list, default=())
    mc.add_argument("--delta", type=_float_list, default=())
    mc.add_argument("--n", type=int, default=3344)
    mc.add_argument("--reps", type=int, default=100)
    mc.add_argument("--burn-in", type=int, default=1000)
    mc.add_argument("--jobs", type=int, default=1)
    mc.add_argument("--both", action="store_true", help="fit the rival family too")
    mc.add_argument("--no-wald", action="store_true")
    mc.add_argument("--restarts", type=int, default=4)
    _add_dist_args(mc)
    mc.add_argument("--seed", type=int, default=None)
    mc.add_argument("--out", default=None)
    mc.add_argument("--manifest", default=None)
    mc.set_defaults(func=_cmd_montecarlo)

    imp = sub.add_parser("impact", help="matched news impact curves as CSV")
    imp.add_argument("--scenario", choices=["flat", "micro", "spike"], required=True)
    imp.add_argument("--steps", type=int, default=60)
    imp.add_argument("--target-variance", type=float, default=0.02)
    imp.add_argument("--out", required=True)
    imp.add_argument("--manifest", default=None)
    imp.set_defaults(func=_cmd_impact)

    rep = sub.add_parser("replay", help="re-run a manifest and reproduce its artifacts")
    rep.add_argument("manifest_file")
    rep.set_defaults(func=_cmd_replay)

    ben = sub.add_parser("bench", help="time the compiled and pure-python kernels")
    ben.add_argument("--n", type=int, default=3344)
    ben.add_argument("--repeats", type=int, default=20)
    ben.add_argument("--json", action="store_true")
    ben.set_defaults(func=_cmd_bench)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    try:
        return int(ns.func(ns, list(argv)) or 0)
    except ExplosionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except EstimationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except VolalabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
