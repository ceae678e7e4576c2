import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats
from scipy.linalg import toeplitz

from ar_bridge.core.errors import CapTooSmallError, DomainError, SpecError, UnstableFilterError
from ar_bridge.models import Filter, RngStream
from ar_bridge.schemas.process import ProcessSpec
from ar_bridge.services import process
from ar_bridge.services.fit import sample_moments
from ar_bridge.services.numerics import levinson, solve_spd


def test_beta_shapes():
    assert process.beta_shapes(1) == (1, 1)
    assert process.beta_shapes(2) == (2, 1)
    assert process.beta_shapes(3) == (2, 2)
    assert process.beta_shapes(4) == (3, 2)


class TestStability:
    def test_stable_and_unstable(self):
        assert process.is_stable(Filter([0.9]))
        assert process.is_stable(Filter([-0.3, 0.09]))
        assert process.is_stable(Filter.white_noise())
        assert not process.is_stable(Filter([1.0]))
        assert not process.is_stable(Filter([0.0, 1.2]))

    @pytest.mark.parametrize("L", [1, 5, 20])
    def test_uniform_filters_are_stable(self, L):
        rng = RngStream(300 + L)
        for _ in range(10_000):
            filter = process.sample_uniform_stable_filter(L, rng)
            assert filter.order == L
            assert process.is_stable(filter)

    def test_first_partial_coefficient_is_uniform(self):
        draws = process.sample_last_coefficients(1, RngStream(7), size=100_000)
        assert stats.kstest(draws, "uniform", args=(-1, 2)).statistic <= 0.01

    def test_scaled_partial_coefficient_at_large_order(self):
        draws = process.sample_last_coefficients(200, RngStream(8), size=100_000)
        assert 0.97 <= np.mean(200 * draws ** 2) <= 1.03

    def test_scaled_gain_at_large_order(self):
        draws = process.sample_last_coefficients(200, RngStream(9), size=100_000)
        gains = -np.log1p(-draws ** 2)
        assert 0.96 <= np.mean(200 * gains) <= 1.06

    def test_order_must_be_positive(self, rng):
        with pytest.raises(DomainError):
            process.sample_uniform_stable_filter(0, rng)


class TestSimulation:
    def test_replays_with_same_stream(self, ar2_truth):
        first = process.simulate(ar2_truth, 500, RngStream(3))
        second = process.simulate(ar2_truth, 500, RngStream(3))
        assert first.shape == (500,)
        assert np.array_equal(first, second)

    def test_unstable_filter(self):
        with pytest.raises(UnstableFilterError):
            process.simulate_ar(Filter([1.0]), 100, RngStream(0))

    def test_ma1_variance(self, ma1_truth):
        data = process.simulate(ma1_truth, 200_000, RngStream(4))
        assert abs(data.var() - 1.64) < 0.03
        assert abs(np.mean(data[1:] * data[:-1]) + 0.8) < 0.02

    def test_ar1_variance(self, ar1_truth):
        data = process.simulate(ar1_truth, 200_000, RngStream(5))
        assert abs(data.var() / (1 / (1 - 0.81)) - 1) < 0.05


class TestAutocovariances:
    def test_ar1(self):
        values = process.true_ar_autocovariances(Filter([0.9]), 3).values
        gamma0 = 1 / (1 - 0.81)
        assert_allclose(values, gamma0 * np.array([1, -0.9, 0.81, -0.729]), rtol=1e-12)

    def test_yule_walker(self):
        psi = np.array([-0.5, 0.3, 0.2])
        values = process.true_ar_autocovariances(Filter(psi, 2.0), 8).values
        assert_allclose(values[0] + psi @ values[1:4], 2.0, rtol=1e-10)
        for lag in range(1, 9):
            past = np.array([values[abs(lag - k)] for k in (1, 2, 3)])
            assert abs(values[lag] + psi @ past) < 1e-10

    def test_ar1_sample_autocovariances(self):
        filter = Filter([-0.5])
        truth = process.true_ar_autocovariances(filter, 5).values
        estimates = np.array([
            sample_moments(process.simulate_ar(filter, 2000, RngStream(500, r)), 5).gamma_hat[:, 0]
            for r in range(200)
        ])
        se = estimates.std(axis=0, ddof=1) / np.sqrt(len(estimates))
        assert np.all(np.abs(estimates.mean(axis=0) - truth) <= 3 * se)

    def test_levinson_matches_cholesky_on_random_truths(self):
        rng = RngStream(81)
        for L in range(1, 21):
            filter = process.sample_uniform_stable_filter(L, rng)
            gamma = process.true_ar_autocovariances(filter, L).values
            recursive = levinson(gamma).filters[L]
            direct = solve_spd(toeplitz(gamma[:L]), -gamma[1: L + 1])
            assert_allclose(recursive, direct, atol=1e-6)
            assert_allclose(recursive, filter.coeffs, atol=1e-6)

    def test_white_noise(self):
        values = process.true_ar_autocovariances(Filter.white_noise(3.0), 2).values
        assert_allclose(values, [3.0, 0.0, 0.0])

    def test_ma1(self, ma1_truth):
        assert_allclose(process.autocovariances(ma1_truth, 3).values, [1.64, -0.8, 0.0, 0.0])

    def test_growing_order(self):
        truth = ProcessSpec.growing_ar()
        assert process.resolve_filter(truth, 100).order == 6
        assert process.resolve_filter(truth, 500).order == 12
        assert process.resolve_filter(truth, 1000).order == 15
        assert process.resolve_filter(truth, 10000).order == 39
        assert_allclose(process.resolve_filter(truth, 100).coeffs, 0.7 ** np.arange(1, 7))

    def test_unresolvable(self, ma1_truth):
        with pytest.raises(SpecError):
            process.resolve_filter(ma1_truth)
        with pytest.raises(SpecError):
            process.resolve_filter(ProcessSpec.growing_ar())


class TestMismatch:
    def test_true_filter_is_exact(self, ar2_truth):
        assert process.mismatch_error(Filter([0.8, 0.64]), ar2_truth) == 0.0

    def test_ma1_closed_form(self, ma1_truth):
        assert_allclose(process.mismatch_error(Filter([0.48780]), ma1_truth), 0.24975, atol=1e-5)

    def test_ma1_best_predictors(self, ma1_truth):
        predictors = process.best_predictors(process.autocovariances(ma1_truth, 12), 12)
        for order in range(13):
            assert_allclose(
                process.mismatch_error(predictors.filters[order], ma1_truth),
                predictors.errors[order] - 1.0, atol=1e-12,
            )

    def test_best_predictors_of_random_truths(self):
        rng = RngStream(77)
        for _ in range(30):
            order = int(rng.generator.integers(1, 7))
            truth = ProcessSpec.finite_ar(process.sample_uniform_stable_filter(order, rng).coeffs.tolist())
            table = process.autocovariances(truth, 10)
            predictors = process.best_predictors(table, 10)
            for L in range(11):
                assert_allclose(
                    process.mismatch_error(predictors.filters[L], truth),
                    predictors.errors[L] - 1.0, rtol=1e-8, atol=1e-10 * table.values[0],
                )

    @pytest.mark.parametrize("truth", [ProcessSpec.finite_ar([0.8, 0.64]), ProcessSpec.ma1(-0.8)])
    def test_trailing_zeros_do_not_change_mismatch(self, truth):
        candidate = Filter([0.5, -0.1])
        padded = Filter(candidate.padded(6))
        assert_allclose(process.mismatch_error(padded, truth), process.mismatch_error(candidate, truth),
                        rtol=1e-10, atol=1e-14)

    def test_white_noise_candidate(self, ar1_truth):
        assert_allclose(process.mismatch_error(Filter.white_noise(), ar1_truth), 1 / 0.19 - 1, rtol=1e-12)


class TestCost:
    def test_curve_matches_cost(self, ma1_truth):
        curve = process.cost_curve(1000, ma1_truth, 6)
        for L in range(7):
            assert_allclose(curve[L], process.cost(L, 1000, ma1_truth), atol=1e-12)

    def test_optimal_order_of_ar1(self, ar1_truth):
        assert process.universally_optimal_order(1000, ar1_truth) == 1
        assert process.bic_cost_minimizer(1000, ar1_truth) == 1

    def test_bic_minimizer_not_above_optimum(self, ma1_truth):
        for N in (100, 1000, 10000):
            assert process.bic_cost_minimizer(N, ma1_truth) <= process.universally_optimal_order(N, ma1_truth)

    def test_ma1_optimal_order_grows_with_N(self, ma1_truth):
        orders = [process.universally_optimal_order(N, ma1_truth) for N in (100, 1000, 10000)]
        assert orders == sorted(orders)
        assert orders[-1] > orders[0]

    def test_cap_too_small(self, ma1_truth):
        with pytest.raises(CapTooSmallError):
            process.universally_optimal_order(10000, ma1_truth, cap=2)
