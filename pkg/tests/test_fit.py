import numpy as np
import pytest
from numpy.testing import assert_allclose

from ar_bridge.core.errors import DegenerateDataError, InsufficientDataError
from ar_bridge.models import Filter
from ar_bridge.services import fit as fit_service


def test_lag_matrix_columns():
    data = np.arange(1.0, 8.0)
    lags = fit_service.lag_matrix(data, 2)
    assert lags.shape == (5, 3)
    assert_allclose(lags[0], [3.0, 2.0, 1.0])
    assert_allclose(lags[-1], [7.0, 6.0, 5.0])


class TestSampleMoments:
    def test_window_and_symmetry(self, ar2_series):
        moments = fit_service.sample_moments(ar2_series, 10)
        assert moments.N == ar2_series.size - 10
        assert moments.N0 == ar2_series.size
        assert_allclose(moments.gamma_hat, moments.gamma_hat.T)
        assert_allclose(moments.gamma_hat[0, 0], np.mean(ar2_series[10:] ** 2), rtol=1e-12)
        assert_allclose(moments.gamma_hat[2, 0], np.mean(ar2_series[10:] * ar2_series[8:-2]), rtol=1e-12)

    def test_constant_series_is_flagged(self):
        assert fit_service.sample_moments(np.full(50, 3.0), 3).degenerate

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            fit_service.sample_moments(np.arange(4.0), 3)


class TestFit:
    def test_recovers_ar1(self, ar1_series):
        table = fit_service.fit(ar1_series, 12)
        assert_allclose(table.filters[1].coeffs, [0.9], atol=0.05)
        assert abs(table.e_hat[1] - 1.0) < 0.1

    def test_errors_non_increasing(self, ar2_fit):
        assert ar2_fit.L_max == 10
        assert np.all(np.diff(ar2_fit.e_hat) <= 0)
        assert np.all(ar2_fit.gain_hat >= 0)
        assert ar2_fit.gain_hat[0] == 0.0
        assert not ar2_fit.degenerate

    def test_error_matches_residuals(self, ar2_series, ar2_fit):
        for order in range(ar2_fit.L_max + 1):
            residual = fit_service.residual_error(ar2_series, ar2_fit.filters[order], ar2_fit.L_max)
            assert_allclose(residual, ar2_fit.e_hat[order], rtol=1e-8)

    def test_gains_are_log_ratios(self, ar2_fit):
        assert_allclose(ar2_fit.gain_hat[1:], np.log(ar2_fit.e_hat[:-1] / ar2_fit.e_hat[1:]))

    def test_constant_series(self):
        with pytest.raises(DegenerateDataError):
            fit_service.fit(np.full(100, 1.5), 4)

    def test_to_dict(self, ar2_fit):
        document = ar2_fit.to_dict()
        assert document["L_max"] == 10
        assert len(document["orders"]) == 11
        assert document["orders"][0]["gain_hat"] is None


class TestPredict:
    def test_one_step(self):
        assert fit_service.predict_one_step(Filter([0.5, 0.25]), [1.0, 2.0, 3.0]) == -2.0

    def test_white_noise_predicts_zero(self):
        assert fit_service.predict_one_step(Filter.white_noise(), []) == 0.0

    def test_short_history(self):
        with pytest.raises(InsufficientDataError):
            fit_service.predict_one_step(Filter([0.5, 0.25]), [1.0])
