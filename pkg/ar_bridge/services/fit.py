"""
Fit Service

Sample moments and per-order least-squares AR fits. The sample covariance
matrix uses the window n = L_max+1..N0 for every lag pair, so it is symmetric
but not Toeplitz; each order is therefore solved directly instead of through
Levinson.
"""

import logging

import numpy as np

from ar_bridge.core.config import get_settings
from ar_bridge.core.errors import DegenerateDataError, InsufficientDataError, SingularMatrixError
from ar_bridge.models import Filter, OrderFitTable, SampleMoments, SymmetricMatrix
from ar_bridge.services.numerics import solve_spd

logger = logging.getLogger(__name__)


def lag_matrix(data: np.ndarray, L_max: int) -> np.ndarray:
    """Rows n = L_max+1..N0 (1-based), column i holding x_{n-i}."""
    N0 = data.size
    return np.column_stack([data[L_max - i: N0 - i] for i in range(L_max + 1)])


def sample_moments(data, L_max: int) -> SampleMoments:
    data = np.asarray(data, dtype=float).reshape(-1)
    N0 = data.size
    if L_max < 1:
        raise InsufficientDataError(f"L_max must be positive, got {L_max}", L_max=L_max)
    if N0 <= L_max + 1:
        raise InsufficientDataError(
            f"series of length {N0} is too short for L_max={L_max}", N0=N0, L_max=L_max
        )
    N = N0 - L_max
    lags = lag_matrix(data, L_max)
    gamma_hat = SymmetricMatrix(lags.T @ lags / N).entries
    degenerate = bool(np.ptp(data) == 0)
    if degenerate:
        logger.warning(f"constant series of length {N0}; fits will be degenerate")
    return SampleMoments(gamma_hat=gamma_hat, L_max=L_max, N=N, N0=N0, degenerate=degenerate)


def fit_all_orders(moments: SampleMoments) -> OrderFitTable:
    """
    Psi_hat_L = -Gamma_hat_L^{-1} gamma_hat_L and e_hat_L = e_hat_0 - gamma_hat_L' Gamma_hat_L^{-1} gamma_hat_L
    for L = 1..L_max, with e_hat_0 = gamma_hat_{0,0}.
    """
    if moments.degenerate:
        raise DegenerateDataError("cannot fit a constant series", N0=moments.N0)

    e0 = float(moments.gamma_hat[0, 0])
    floor = get_settings().EFLOOR_SCALE * e0
    e_hat = np.empty(moments.L_max + 1)
    floored = np.zeros(moments.L_max + 1, dtype=bool)
    e_hat[0] = e0
    filters = [Filter.white_noise(e0)]

    for order in range(1, moments.L_max + 1):
        gamma = moments.gamma_vector(order)
        try:
            solution = solve_spd(moments.gamma_matrix(order), gamma)
        except SingularMatrixError as e:
            raise SingularMatrixError(e.message, pivot=e.pivot, order=order)
        e = e0 - gamma @ solution
        if not e > floor:
            logger.warning(f"e_hat at order {order} is {e:.3e}; flooring at {floor:.3e}")
            e = floor
            floored[order] = True
        e_hat[order] = e
        filters.append(Filter(-solution, e))

    # Nested least-squares errors never increase; rounding may still nudge them up
    e_hat = np.minimum.accumulate(e_hat)
    gain_hat = np.zeros(moments.L_max + 1)
    gain_hat[1:] = np.log(e_hat[:-1] / e_hat[1:])
    return OrderFitTable(
        filters=filters, e_hat=e_hat, gain_hat=gain_hat, floored=floored, N=moments.N, N0=moments.N0
    )


def fit(data, L_max: int) -> OrderFitTable:
    return fit_all_orders(sample_moments(data, L_max))


def residual_error(data, filter: Filter, L_max: int) -> float:
    """(1/N) sum_{n=L_max+1}^{N0} (x_n + sum_l psi_l x_{n-l})^2, the direct form of e_hat_L."""
    data = np.asarray(data, dtype=float).reshape(-1)
    lags = lag_matrix(data, L_max)
    residuals = lags[:, 0] + lags[:, 1: filter.order + 1] @ filter.coeffs
    return float(residuals @ residuals / lags.shape[0])


def predict_one_step(filter: Filter, history) -> float:
    """x_hat_n = -sum_l psi_l x_{n-l}, with ``history`` ordered oldest to newest."""
    history = np.asarray(history, dtype=float).reshape(-1)
    if history.size < filter.order:
        raise InsufficientDataError(
            f"order {filter.order} prediction needs {filter.order} past values, got {history.size}",
            order=filter.order, available=history.size,
        )
    if filter.order == 0:
        return 0.0
    recent = history[::-1][: filter.order]
    return float(-(filter.coeffs @ recent))

