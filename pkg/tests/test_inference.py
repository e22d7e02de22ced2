import numpy as np
import pytest
from scipy.stats import chi2

import volalab as v
from volalab.errors import (
    CovarianceUnavailableError,
    DegeneracyError,
    InvalidInputError,
    NotApplicableError,
)
from volalab.estimate import FitResult


def _result(params, acov, family):
    d = params.as_vector().size
    se = None if acov is None else np.sqrt(np.abs(np.diag(acov)))
    return FitResult(
        params=params,
        family=family,
        q_n=1.0,
        loglik=-0.5,
        se=se,
        acov=acov,
        kurtosis=3.0,
        eta=np.zeros(10),
        converged=True,
        n=10,
        r0=2,
        n_used=8,
        iterations=1,
        message="",
        cov_warning=None,
        diagnostics=None,
        eps=np.zeros(10),
        floor=1e-8,
        init=v.InitPolicy(),
    )


def _lg(omega, ap, am, beta, acov):
    return _result(v.LogGarchParams(omega, ap, am, beta), acov, "log-garch")


class TestWaldSymmetry:
    def test_symmetric_coefficients_give_zero(self):
        rep = v.wald_symmetry(_lg(0.1, (0.2,), (0.2,), (0.5,), np.eye(4)))
        assert rep.statistic == 0.0
        assert rep.dof == 1
        assert rep.p_value == 1.0

    def test_statistic_is_the_squared_contrast_over_its_variance(self):
        acov = np.zeros((4, 4))
        acov[1, 1], acov[2, 2], acov[1, 2] = 0.004, 0.003, 0.001
        acov[2, 1] = acov[1, 2]
        rep = v.wald_symmetry(_lg(0.1, (0.3,), (0.1,), (0.4,), acov))
        want = 0.2**2 / (0.004 + 0.003 - 2 * 0.001)
        assert rep.statistic == pytest.approx(want, rel=1e-12)
        assert rep.p_value == pytest.approx(chi2.sf(want, 1), rel=1e-12)

    def test_five_percent_critical_value(self):
        crit = chi2.ppf(0.95, 1)
        acov = np.zeros((4, 4))
        acov[1, 1] = 0.2**2 / crit
        rep = v.wald_symmetry(_lg(0.1, (0.3,), (0.1,), (0.4,), acov))
        assert rep.p_value == pytest.approx(0.05, abs=1e-12)

    def test_two_lags_give_two_degrees_of_freedom(self):
        fit = _lg(0.1, (0.3, 0.1), (0.1, 0.1), (0.4,), 0.01 * np.eye(6))
        rep = v.wald_symmetry(fit)
        assert rep.dof == 2
        # independent contrasts: (0.2^2 + 0.0^2) / (2 * 0.01)
        assert rep.statistic == pytest.approx(0.2**2 / 0.02, rel=1e-12)

    def test_egarch_tests_the_signed_coefficients(self):
        params = v.EgarchParams(-0.2, (0.9,), (-0.06,), (0.2,))
        acov = 0.0009 * np.eye(4)
        rep = v.wald_symmetry(_result(params, acov, "egarch"))
        assert rep.dof == 1
        assert rep.statistic == pytest.approx(0.06**2 / 0.0009, rel=1e-12)

    def test_no_asymmetry_coefficients(self):
        with pytest.raises(NotApplicableError):
            v.wald_symmetry(_lg(0.1, (), (), (0.5,), np.eye(2)))
        params = v.EgarchParams(-0.2, (0.9,), (), ())
        with pytest.raises(NotApplicableError):
            v.wald_symmetry(_result(params, np.eye(2), "egarch"))

    def test_missing_covariance(self):
        with pytest.raises(CovarianceUnavailableError):
            v.wald_symmetry(_lg(0.1, (0.3,), (0.1,), (0.4,), None))

    def test_singular_restricted_covariance(self):
        fit = _lg(0.1, (0.3, 0.1), (0.1, 0.1), (0.4,), np.zeros((6, 6)))
        with pytest.raises(DegeneracyError):
            v.wald_symmetry(fit)

    def test_report_round_trips_to_dict(self):
        rep = v.wald_symmetry(_lg(0.1, (0.3,), (0.1,), (0.4,), np.eye(4)))
        out = rep.to_dict()
        assert set(out) == {"statistic", "dof", "p_value"}
        assert out["dof"] == 1


class TestCompareModels:
    def test_ranks_by_log_likelihood(self, sample):
        series, _ = sample
        lg = v.fit_log_garch(series)
        eg = v.fit_egarch(series)
        rep = v.compare_models(lg, eg)
        best = max((lg, eg), key=lambda f: f.loglik)
        assert rep.winner == best.family
        assert rep.margin == pytest.approx(abs(lg.loglik - eg.loglik))
        assert rep.loglik_a == lg.loglik and rep.loglik_b == eg.loglik

    def test_identical_fits_tie(self, sample):
        series, _ = sample
        fit = v.fit_log_garch(series)
        rep = v.compare_models(fit, fit)
        assert rep.winner == "tie"
        assert rep.margin == 0.0

    def test_window_mismatch(self, sample):
        series, _ = sample
        a = v.fit_log_garch(series)
        b = v.fit_log_garch(series, options=v.FitOptions(r0=40))
        with pytest.raises(InvalidInputError, match="window"):
            v.compare_models(a, b)

    def test_different_series(self, sample, theta0):
        series, _ = sample
        other, _ = v.simulate_log_garch(theta0, v.normal(), v.SimConfig(n=3344, seed=7))
        a = v.fit_log_garch(series)
        b = v.fit_log_garch(other)
        with pytest.raises(InvalidInputError, match="different series"):
            v.compare_models(a, b)

    def test_report_round_trips_to_dict(self, sample):
        series, _ = sample
        fit = v.fit_log_garch(series)
        out = v.compare_models(fit, fit).to_dict()
        assert out["winner"] == "tie"
        assert set(out) == {
            "family_a",
            "family_b",
            "loglik_a",
            "loglik_b",
            "winner",
            "margin",
        }
