import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import toeplitz

from ar_bridge.core.errors import DegenerateSequenceError, DomainError, SingularMatrixError
from ar_bridge.models import RngStream, SymmetricMatrix
from ar_bridge.services import numerics


def test_floor_power_exact_cubes():
    assert numerics.floor_power(1000, 1 / 3) == 10
    assert numerics.floor_power(999, 1 / 3) == 9
    assert numerics.floor_power(8, 1 / 3) == 2
    assert numerics.floor_power(100, 0.4) == 6


class TestChiSquare:
    def test_tail_at_two(self):
        assert abs(numerics.chi2_1_tail(2.0) - 0.1573) < 5e-5

    def test_tail_at_zero(self):
        assert numerics.chi2_1_tail(0.0) == 1.0

    def test_quantile(self):
        assert_allclose(numerics.chi2_1_quantile(0.95), 3.841459, rtol=1e-6)

    def test_quantile_inverts_tail(self):
        for s in (0.1, 1.0, 3.0, 9.5):
            assert_allclose(numerics.chi2_1_quantile(1 - numerics.chi2_1_tail(s)), s, rtol=1e-8)

    @pytest.mark.parametrize("p", [0.01, 0.1, 0.5, 0.9, 0.99])
    def test_tail_inverts_quantile(self, p):
        assert_allclose(numerics.chi2_1_tail(numerics.chi2_1_quantile(p)), 1 - p, rtol=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            numerics.chi2_1_tail(-1.0)
        with pytest.raises(DomainError):
            numerics.chi2_1_quantile(0.0)
        with pytest.raises(DomainError):
            numerics.chi2_1_quantile(1.0)


class TestBeta:
    def test_cdf(self):
        assert_allclose(numerics.beta_cdf(0.5, 2, 2), 0.5)
        assert_allclose(numerics.beta_cdf(0.3, 1, 1), 0.3)
        assert numerics.beta_cdf(0.0, 3, 2) == 0.0
        assert numerics.beta_cdf(1.0, 3, 2) == 1.0

    def test_cdf_domain(self):
        with pytest.raises(DomainError):
            numerics.beta_cdf(1.5, 1, 1)
        with pytest.raises(DomainError):
            numerics.beta_cdf(0.5, 0, 1)

    def test_sample_mean(self):
        draws = numerics.sample_beta(2.0, 3.0, RngStream(5), size=100_000)
        assert draws.shape == (100_000,)
        assert np.all((draws > 0) & (draws < 1))
        assert abs(draws.mean() - 0.4) < 0.005

    def test_scalar_draw(self):
        assert isinstance(numerics.sample_beta(1.0, 1.0, RngStream(5)), float)


def test_normal_draws_replay():
    first = numerics.sample_std_normal(RngStream(9, 3), size=10)
    second = numerics.sample_std_normal(RngStream(9, 3), size=10)
    other = numerics.sample_std_normal(RngStream(9, 4), size=10)
    assert np.array_equal(first, second)
    assert not np.array_equal(first, other)


class TestSolveSpd:
    def test_matches_dense_solve(self):
        A = np.array([[4.0, 2.0, 0.5], [2.0, 3.0, 0.2], [0.5, 0.2, 2.0]])
        b = np.array([1.0, 2.0, 3.0])
        assert_allclose(numerics.solve_spd(A, b), np.linalg.solve(A, b), rtol=1e-12)

    def test_accepts_symmetric_matrix(self):
        A = SymmetricMatrix(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert_allclose(numerics.solve_spd(A, np.array([3.0, 3.0])), [1.0, 1.0])

    def test_singular_raises(self):
        with pytest.raises(SingularMatrixError) as info:
            numerics.solve_spd(np.ones((3, 3)), np.array([1.0, 2.0, 3.0]))
        assert info.value.pivot >= 1
        assert info.value.code == "singular_matrix"

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            numerics.solve_spd(np.eye(2), np.ones(3))


class TestLevinson:
    def test_ma1_first_order(self):
        result = numerics.levinson(np.array([1.64, -0.8, 0.0]))
        assert_allclose(result.last_coeffs[0], 0.487805, atol=1e-6)
        assert_allclose(result.errors[1], 1.249756, atol=1e-6)

    def test_error_recursion(self):
        gamma = np.array([1.64, -0.8, 0.0, 0.0, 0.0, 0.0])
        result = numerics.levinson(gamma)
        k = result.last_coeffs
        assert_allclose(result.errors[1:], result.errors[:-1] * (1 - k * k), rtol=1e-12)
        assert np.all(np.diff(result.errors) <= 0)

    def test_matches_toeplitz_solve(self):
        gamma = np.array([2.0, 1.2, 0.5, 0.1, -0.05])
        result = numerics.levinson(gamma)
        for order in range(1, gamma.size):
            direct = np.linalg.solve(toeplitz(gamma[:order]), -gamma[1: order + 1])
            assert_allclose(result.filters[order], direct, atol=1e-10)

    def test_partial_coefficients_expand_to_filter(self):
        gamma = np.array([2.0, 1.2, 0.5, 0.1, -0.05])
        result = numerics.levinson(gamma)
        assert_allclose(numerics.expand_partial_coefficients(result.last_coeffs), result.filters[-1], atol=1e-12)

    def test_expand_two_coefficients(self):
        assert_allclose(numerics.expand_partial_coefficients([0.5, 0.2]), [0.5 + 0.2 * 0.5, 0.2])

    def test_errors_only(self):
        gamma = np.array([2.0, 1.2, 0.5, 0.1, -0.05])
        full = numerics.levinson(gamma)
        lean = numerics.levinson(gamma, keep_filters=False)
        assert_allclose(lean.errors, full.errors)
        assert len(lean.filters) == 1
        assert_allclose(lean.filters[0], full.filters[-1])

    def test_vanishing_error(self):
        with pytest.raises(DegenerateSequenceError) as info:
            numerics.levinson(np.array([1.0, 1.0]))
        assert info.value.order == 1

    def test_non_positive_variance(self):
        with pytest.raises(DegenerateSequenceError):
            numerics.levinson(np.array([0.0, 0.0]))
        assert math.isfinite(numerics.levinson(np.array([1.0])).errors[0])
