import numpy as np
import pytest

import volalab as v
from volalab.errors import EstimationError, InvalidInputError, NotApplicableError
from volalab.montecarlo import StudyResult

TRUTH = v.LogGarchParams(0.05, (0.1,), (0.05,), (0.8,))


def _tiny_study(**kw):
    kw.setdefault("n", 600)
    kw.setdefault("reps", 6)
    kw.setdefault("seed", 3)
    return v.run_replications(TRUTH, v.normal(), **kw)


class TestRunReplications:
    def test_worker_count_does_not_change_any_number(self):
        a = _tiny_study(jobs=1)
        b = _tiny_study(jobs=2)
        np.testing.assert_array_equal(a.estimates, b.estimates)
        np.testing.assert_array_equal(a.se, b.se)
        np.testing.assert_array_equal(a.loglik, b.loglik)
        np.testing.assert_array_equal(a.wald_p, b.wald_p)

    def test_replications_differ_from_each_other(self):
        study = _tiny_study()
        assert np.unique(study.loglik[study.ok]).size > 1

    def test_explosive_truth_reports_total_failure(self):
        bad = v.LogGarchParams(0.0, (0.1,), (0.1,), (1.5,))
        with pytest.raises(EstimationError, match="every replication failed"):
            v.run_replications(bad, v.normal(), n=600, reps=2, burn_in=0)

    def test_summary_shape(self):
        out = _tiny_study().summary()
        for key in (
            "family",
            "n",
            "reps",
            "succeeded",
            "failed",
            "truth",
            "mean_estimate",
            "bias",
            "rmse",
            "mean_se",
            "coverage_95",
        ):
            assert key in out
        assert out["family"] == "log-garch"
        assert out["succeeded"] + out["failed"] == out["reps"]
        assert set(out["truth"]) == {"omega", "alpha_pos_1", "alpha_neg_1", "beta_1"}
        assert "wald_rejection_5pct" in out

    def test_fit_both_records_winners(self):
        study = _tiny_study(reps=4, fit_both=True)
        counts = study.winner_counts()
        assert sum(counts.values()) == int(study.ok.sum())
        assert set(counts) <= {"log-garch", "egarch", "tie"}
        assert not np.isnan(study.alt_loglik[study.ok]).any()
        assert "winner_counts" in study.summary()

    def test_egarch_truth_runs_the_other_family(self):
        truth = v.EgarchParams(-0.1, (0.9,), (-0.05,), (0.2,))
        study = v.run_replications(truth, v.normal(), n=600, reps=3, seed=4)
        assert study.family == "egarch"
        assert study.names[0] == "omega"
        assert study.ok.sum() >= 2

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            v.run_replications(TRUTH, v.normal(), reps=0)
        with pytest.raises(InvalidInputError):
            v.run_replications(TRUTH, v.normal(), reps=2, jobs=0)

    def test_rejection_rate_needs_wald_results(self):
        study = _tiny_study(reps=2, wald=False)
        with pytest.raises(NotApplicableError):
            study.rejection_rate()


class TestAggregates:
    def _hand_built(self):
        estimates = np.array([[1.0, 2.0], [3.0, 4.0], [np.nan, np.nan]])
        se = np.array([[1.0, 1.0], [1.0, 1.0], [np.nan, np.nan]])
        return StudyResult(
            family="log-garch",
            names=("omega", "beta_1"),
            truth=np.array([2.0, 3.0]),
            n=100,
            reps=3,
            estimates=estimates,
            se=se,
            loglik=np.array([-1.0, -2.0, np.nan]),
            alt_loglik=np.full(3, np.nan),
            wald_p=np.array([0.01, 0.5, np.nan]),
            winners=(None, None, None),
            converged=np.array([True, True, False]),
            failures=((2, "EstimationError: boom"),),
        )

    def test_moment_formulas(self):
        study = self._hand_built()
        np.testing.assert_array_equal(study.ok, [True, True, False])
        np.testing.assert_allclose(study.mean_estimate(), [2.0, 3.0])
        np.testing.assert_allclose(study.bias(), [0.0, 0.0])
        np.testing.assert_allclose(study.rmse(), [1.0, 1.0])
        np.testing.assert_allclose(study.sd_estimate(), [np.sqrt(2.0), np.sqrt(2.0)])
        np.testing.assert_allclose(study.mean_se(), [1.0, 1.0])

    def test_coverage_counts_interval_hits(self):
        study = self._hand_built()
        # both estimates sit 1 se from the truth, well inside 1.96 se
        np.testing.assert_allclose(study.coverage(0.95), [1.0, 1.0])
        np.testing.assert_allclose(study.coverage(0.5), [0.0, 0.0])
        with pytest.raises(InvalidInputError):
            study.coverage(1.5)

    def test_rejection_rate_on_hand_values(self):
        study = self._hand_built()
        assert study.rejection_rate(0.05) == 0.5
        assert study.rejection_rate(0.001) == 0.0
