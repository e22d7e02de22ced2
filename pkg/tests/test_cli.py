import json
import re
import subprocess
import sys

import numpy as np
import pytest

import volalab as v
from volalab.cli import main


def _run(*argv):
    return main(list(argv))


def _simulate_args(out, n=600, seed=5):
    return [
        "simulate",
        "--family",
        "log-garch",
        "--omega",
        "0.05",
        "--alpha-pos",
        "0.1",
        "--alpha-neg",
        "0.05",
        "--beta",
        "0.8",
        "--n",
        str(n),
        "--seed",
        str(seed),
        "--out",
        str(out),
    ]


class TestSimulate:
    def test_writes_series_and_manifest(self, tmp_path, capsys):
        out = tmp_path / "sim.csv"
        assert _run(*_simulate_args(out)) == 0
        assert "wrote 600 observations" in capsys.readouterr().out
        assert v.load_series_csv(out).values.shape == (600,)
        manifest = json.loads((tmp_path / "sim.csv.manifest.json").read_text())
        assert manifest["schema"] == "volalab/manifest/v1"
        assert manifest["seed"] == 5
        assert manifest["artifacts"] == [str(out)]
        assert "--seed" in manifest["argv"]

    def test_same_seed_same_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        _run(*_simulate_args(a, seed=9))
        _run(*_simulate_args(b, seed=9))
        assert a.read_bytes() == b.read_bytes()
        c = tmp_path / "c.csv"
        _run(*_simulate_args(c, seed=10))
        assert c.read_bytes() != a.read_bytes()

    def test_seed_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("VOLALAB_SEED", "7")
        out = tmp_path / "env.csv"
        argv = _simulate_args(out)
        del argv[argv.index("--seed") : argv.index("--seed") + 2]
        assert _run(*argv) == 0
        manifest = json.loads((tmp_path / "env.csv.manifest.json").read_text())
        assert manifest["seed"] == 7
        # the stored argv pins the resolved seed so replays ignore the env
        idx = manifest["argv"].index("--seed")
        assert manifest["argv"][idx + 1] == "7"

    def test_vol_out_writes_the_variance_path(self, tmp_path):
        out, vol = tmp_path / "s.csv", tmp_path / "v.csv"
        assert _run(*_simulate_args(out), "--vol-out", str(vol)) == 0
        path = v.load_series_csv(vol, column="log_sigma2")
        assert path.values.shape == (600,)

    def test_acd_family_writes_durations_and_directions(self, tmp_path):
        out = tmp_path / "acd.csv"
        code = _run(
            "simulate",
            "--family",
            "log-acd",
            "--omega",
            "0.1",
            "--alpha-pos",
            "0.08",
            "--alpha-neg",
            "0.15",
            "--beta",
            "0.7",
            "--n",
            "400",
            "--seed",
            "3",
            "--out",
            str(out),
        )
        assert code == 0
        durations = v.load_series_csv(out, column="duration")
        assert np.all(durations.values > 0)
        directions = v.load_series_csv(out, column="direction")
        assert set(np.unique(directions.values)) <= {-1.0, 1.0}

    def test_explosive_parameters_exit_3(self, tmp_path, capsys):
        out = tmp_path / "boom.csv"
        argv = _simulate_args(out)
        argv[argv.index("--beta") + 1] = "1.5"
        assert _run(*argv, "--burn-in", "50") == 3
        assert "error:" in capsys.readouterr().err


@pytest.fixture(scope="module")
def sim_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("fit") / "sample.csv"
    _run(*_simulate_args(out, n=2000, seed=11))
    return out


class TestFit:
    def test_report_and_table(self, sim_csv, tmp_path, capsys):
        report_path = tmp_path / "fit.json"
        code = _run(
            "fit",
            "--family",
            "log-garch",
            "--input",
            str(sim_csv),
            "--out",
            str(report_path),
        )
        assert code == 0
        report = json.loads(report_path.read_text())
        assert report["schema"] == "volalab/fit/v1"
        assert set(report["params"]) == {
            "omega",
            "alpha_pos_1",
            "alpha_neg_1",
            "beta_1",
        }
        assert report["wald_symmetry"]["dof"] == 1
        assert "diagnostics" in report
        out = capsys.readouterr().out
        rows = re.findall(r"^ *(\w+) = +-?\d+\.\d{5} +\(se \d+\.\d{4}\)$", out, re.M)
        assert rows == ["omega", "alpha_pos_1", "alpha_neg_1", "beta_1"]
        assert re.search(r"^log-likelihood -?\d+\.\d{6}, converged True$", out, re.M)
        manifest = json.loads((tmp_path / "fit.json.manifest.json").read_text())
        assert manifest["artifacts"] == [str(report_path)]

    def test_stdout_json_when_no_out(self, sim_csv, tmp_path, capsys):
        code = _run("fit", "--family", "log-garch", "--input", str(sim_csv))
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["schema"] == "volalab/fit/v1"
        assert not list(tmp_path.iterdir())

    def test_compare_includes_the_rival(self, sim_csv, capsys):
        code = _run(
            "fit", "--family", "log-garch", "--input", str(sim_csv), "--compare"
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["rival"]["family"] == "egarch"
        assert report["comparison"]["winner"] in {"log-garch", "egarch", "tie"}

    def test_missing_input_exits_2(self, tmp_path, capsys):
        code = _run("fit", "--family", "log-garch", "--input", str(tmp_path / "no.csv"))
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_short_series_exits_4(self, tmp_path, capsys):
        short = tmp_path / "short.csv"
        v.write_series_csv(short, v.Series(np.ones(30)))
        code = _run("fit", "--family", "log-garch", "--input", str(short))
        assert code == 4
        assert "too short" in capsys.readouterr().err

    def test_fixed_init_needs_both_values(self, sim_csv, capsys):
        code = _run(
            "fit",
            "--family",
            "log-garch",
            "--input",
            str(sim_csv),
            "--init",
            "fixed",
        )
        assert code == 2
        assert "--init-eps2" in capsys.readouterr().err


class TestDiagnose:
    def test_stdout_report(self, capsys):
        code = _run(
            "diagnose",
            "--omega",
            "0.024",
            "--alpha-pos",
            "0.027",
            "--alpha-neg",
            "0.016",
            "--beta",
            "0.971",
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["schema"] == "volalab/diagnostics/v1"
        assert report["lyapunov"]["estimate"] < 0
        assert report["params"]["alpha_neg"] == [0.016]

    def test_file_output_prints_the_verdict(self, tmp_path, capsys):
        out = tmp_path / "diag.json"
        code = _run(
            "diagnose",
            "--omega",
            "0.0",
            "--alpha-pos",
            "0.1",
            "--alpha-neg",
            "0.1",
            "--beta",
            "0.7",
            "--out",
            str(out),
        )
        assert code == 0
        assert "stationary" in capsys.readouterr().out
        assert out.exists() and (tmp_path / "diag.json.manifest.json").exists()


class TestMonteCarlo:
    def test_summary_json(self, capsys):
        code = _run(
            "montecarlo",
            "--family",
            "log-garch",
            "--omega",
            "0.05",
            "--alpha-pos",
            "0.1",
            "--alpha-neg",
            "0.05",
            "--beta",
            "0.8",
            "--n",
            "600",
            "--reps",
            "3",
            "--seed",
            "2",
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["schema"] == "volalab/study/v1"
        assert report["reps"] == 3
        assert report["succeeded"] + report["failed"] == 3


class TestImpact:
    @pytest.mark.parametrize("scenario", ["flat", "micro", "spike"])
    def test_writes_all_three_curves(self, tmp_path, scenario):
        out = tmp_path / f"{scenario}.csv"
        assert _run("impact", "--scenario", scenario, "--steps", "40", "--out", str(out)) == 0
        header = out.read_text().splitlines()[0]
        assert header == "step,shock,log_garch,egarch,garch"
        assert len(out.read_text().splitlines()) == 41

    def test_too_few_steps_exit_2(self, tmp_path):
        out = tmp_path / "x.csv"
        assert _run("impact", "--scenario", "flat", "--steps", "5", "--out", str(out)) == 2


class TestReplay:
    def test_reproduces_artifact_bytes(self, tmp_path, capsys):
        out = tmp_path / "sim.csv"
        _run(*_simulate_args(out, seed=13))
        original = out.read_bytes()
        out.unlink()
        code = _run("replay", str(tmp_path / "sim.csv.manifest.json"))
        assert code == 0
        assert out.read_bytes() == original
        assert "replaying: volalab simulate" in capsys.readouterr().out

    def test_rejects_non_manifests(self, tmp_path, capsys):
        bogus = tmp_path / "bogus.json"
        bogus.write_text('{"schema": "other"}')
        assert _run("replay", str(bogus)) == 2
        assert "not a manifest" in capsys.readouterr().err


class TestBench:
    def test_json_output(self, capsys):
        assert _run("bench", "--n", "400", "--repeats", "2", "--json") == 0
        report = json.loads(capsys.readouterr().out)
        assert report["n"] == 400
        assert report["active_backend"] in {"compiled", "pure-python"}
        assert report["rows"]

    def test_table_output(self, capsys):
        assert _run("bench", "--n", "400", "--repeats", "2") == 0
        out = capsys.readouterr().out
        assert "python" in out


class TestUsage:
    def test_unknown_subcommand_exits_2(self, capsys):
        assert _run("frobnicate") == 2
        capsys.readouterr()

    def test_console_script_reports_the_version(self):
        proc = subprocess.run(
            [sys.executable, "-m", "volalab.cli", "--version"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == f"volalab {v.__version__}"

    def test_installed_entry_point(self):
        proc = subprocess.run(
            ["volalab", "--version"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith("volalab ")
