"""
Process Service

True data-generating processes and the oracle side of the toolkit:
- stability checks and uniform sampling of stable filters
- simulation of AR and MA(1) processes
- exact autocovariances, best finite-order predictors
- mismatch error, the cost function C_N(L) and its minimizers
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.signal import lfilter

from ar_bridge.core.config import get_settings
from ar_bridge.core.errors import (CapTooSmallError, DegenerateProcessError,
                                   DomainError, SpecError, UnstableFilterError)
from ar_bridge.models import AutocovarianceTable, Filter, RngStream
from ar_bridge.schemas.process import ProcessKind, ProcessSpec
from ar_bridge.services.numerics import (expand_partial_coefficients, floor_power,
                                         levinson, sample_beta, sample_std_normal)

logger = logging.getLogger(__name__)

GrowingRule = Callable[[int, ProcessSpec], np.ndarray]

GROWING_RULES: Dict[str, GrowingRule] = {}


def register_growing_rule(name: str):
    """Register a rule mapping a sample size to the coefficients of a growing-order truth."""
    def decorator(func: GrowingRule) -> GrowingRule:
        GROWING_RULES[name] = func
        return func
    return decorator


def growing_order(N: int, order_exponent: float) -> int:
    return max(1, floor_power(N, order_exponent))


@register_growing_rule("geometric")
def geometric_rule(N: int, spec: ProcessSpec) -> np.ndarray:
    """psi_k = decay^k for k = 1..floor(N^order_exponent)."""
    order = growing_order(N, spec.order_exponent)
    return spec.decay ** np.arange(1, order + 1)


def beta_shapes(k: int) -> tuple:
    """Shapes of the Beta law of (psi_{k,k} + 1) / 2 under the uniform stable-filter prior."""
    return math.floor(k / 2 + 1), math.floor((k + 1) / 2)


def is_stable(filter: Filter) -> bool:
    if filter.order == 0:
        return True
    companion = np.zeros((filter.order, filter.order))
    companion[0, :] = -filter.coeffs
    companion[1:, :-1] = np.eye(filter.order - 1)
    moduli = np.abs(np.linalg.eigvals(companion))
    return bool(np.all(moduli < 1.0 - get_settings().STABILITY_TOL))


def sample_last_coefficients(L: int, rng: RngStream, size: Optional[int] = None):
    """Draws of psi_{L,L}: (psi_{L,L} + 1) / 2 ~ Beta(floor(L/2 + 1), floor((L + 1)/2))."""
    if L < 1:
        raise DomainError(f"order must be positive, got {L}", L=L)
    a, b = beta_shapes(L)
    return 2.0 * sample_beta(a, b, rng, size) - 1.0


def sample_uniform_stable_filter(L: int, rng: RngStream, noise_variance: float = 1.0) -> Filter:
    """A filter drawn uniformly from the stable region by sampling its partial coefficients."""
    if L < 1:
        raise DomainError(f"order must be positive, got {L}", L=L)
    last = np.array([sample_last_coefficients(k, rng) for k in range(1, L + 1)])
    return Filter(expand_partial_coefficients(last), noise_variance)


def default_burnin(order: int) -> int:
    settings = get_settings()
    return max(settings.BURNIN_FACTOR * order, settings.BURNIN_MIN)


def simulate_ar(filter: Filter, n: int, rng: RngStream, burnin: Optional[int] = None) -> np.ndarray:
    """Run x_n = -sum psi_l x_{n-l} + eps_n from a zero state and keep n values after the burn-in."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}", n=n)
    if not is_stable(filter):
        raise UnstableFilterError(
            f"filter {filter.coeffs.tolist()} is not stable", coeffs=filter.coeffs.tolist()
        )
    if burnin is None:
        burnin = default_burnin(filter.order)
    eps = math.sqrt(filter.noise_variance) * sample_std_normal(rng, burnin + n)
    x = lfilter([1.0], np.r_[1.0, filter.coeffs], eps)
    return x[burnin:]


def simulate_ma1(theta: float, noise_variance: float, n: int, rng: RngStream) -> np.ndarray:
    """x_n = eps_n + theta eps_{n-1}."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}", n=n)
    if not noise_variance > 0:
        raise DomainError(f"noise variance must be positive, got {noise_variance}")
    eps = math.sqrt(noise_variance) * sample_std_normal(rng, n + 1)
    return eps[1:] + theta * eps[:-1]


def true_ar_autocovariances(filter: Filter, max_lag: int) -> AutocovarianceTable:
    """
    Exact autocovariances of a stable AR(L0) process.

    The Yule-Walker equations are rewritten as (I + Phi) rho = -Psi, where
    Phi[l, j] = psi_{l+j} (j <= L0 - l) + psi_{l-j} (j < l); then
    gamma_0 = sigma^2 / (1 + rho' Psi) and gamma_l = -sum_k psi_k gamma_{l-k} past L0.
    """
    sigma2 = filter.noise_variance
    L0 = filter.order
    if L0 == 0:
        values = np.zeros(max_lag + 1)
        values[0] = sigma2
        return AutocovarianceTable(values)
    if not is_stable(filter):
        raise UnstableFilterError(f"filter {filter.coeffs.tolist()} is not stable")

    psi = filter.coeffs
    phi = np.zeros((L0, L0))
    for row in range(1, L0 + 1):
        for col in range(1, L0 + 1):
            if row + col <= L0:
                phi[row - 1, col - 1] += psi[row + col - 1]
            if col < row:
                phi[row - 1, col - 1] += psi[row - col - 1]
    try:
        rho = -np.linalg.solve(np.eye(L0) + phi, psi)
    except np.linalg.LinAlgError as e:
        raise DegenerateProcessError(f"I + Phi is singular: {e}", coeffs=psi.tolist())

    gamma0 = sigma2 / (1.0 + rho @ psi)
    values = np.empty(max(max_lag, L0) + 1)
    values[0] = gamma0
    values[1: L0 + 1] = gamma0 * rho
    for lag in range(L0 + 1, values.size):
        values[lag] = -psi @ values[lag - 1: lag - L0 - 1: -1]
    return AutocovarianceTable(values[: max_lag + 1])


def ma1_autocovariances(theta: float, noise_variance: float, max_lag: int) -> AutocovarianceTable:
    values = np.zeros(max_lag + 1)
    values[0] = noise_variance * (1.0 + theta * theta)
    if max_lag >= 1:
        values[1] = noise_variance * theta
    return AutocovarianceTable(values)


def resolve_filter(truth: ProcessSpec, N: Optional[int] = None) -> Filter:
    """The AR filter of a finite or growing-order truth (at sample size N for the latter)."""
    if truth.kind == ProcessKind.FINITE_AR:
        filter = Filter(truth.coeffs, truth.sigma2)
    elif truth.kind == ProcessKind.GROWING_AR:
        if N is None:
            raise SpecError("a growing-order truth needs a sample size", kind=truth.kind.value)
        rule = GROWING_RULES.get(truth.rule)
        if rule is None:
            raise SpecError(f"unknown growing-order rule {truth.rule!r}", rule=truth.rule)
        filter = Filter(rule(N, truth), truth.sigma2)
    else:
        raise SpecError(f"{truth.kind.value} truth has no finite AR filter", kind=truth.kind.value)
    if not is_stable(filter):
        raise UnstableFilterError(
            f"filter {filter.coeffs.tolist()} is not stable", coeffs=filter.coeffs.tolist()
        )
    return filter


def autocovariances(truth: ProcessSpec, max_lag: int, N: Optional[int] = None) -> AutocovarianceTable:
    if truth.kind == ProcessKind.MA1:
        return ma1_autocovariances(truth.theta, truth.sigma2, max_lag)
    return true_ar_autocovariances(resolve_filter(truth, N), max_lag)


def simulate(truth: ProcessSpec, n: int, rng: RngStream, N: Optional[int] = None,
             burnin: Optional[int] = None) -> np.ndarray:
    """Simulate n values of any truth; growing-order truths are resolved at N (default n)."""
    if truth.kind == ProcessKind.MA1:
        return simulate_ma1(truth.theta, truth.sigma2, n, rng)
    return simulate_ar(resolve_filter(truth, N if N is not None else n), n, rng, burnin)


@dataclass(frozen=True, eq=False)
class BestPredictors:
    filters: List[Filter]
    errors: np.ndarray


def best_predictors(table: AutocovarianceTable, L_max: int) -> BestPredictors:
    """Theoretical best linear predictors Psi_L and errors e_L for L = 0..L_max."""
    if L_max > table.max_lag:
        raise DomainError(f"table holds lags up to {table.max_lag}, need {L_max}")
    result = levinson(table.values[: L_max + 1])
    filters = [Filter(psi, float(e)) for psi, e in zip(result.filters, result.errors)]
    return BestPredictors(filters=filters, errors=result.errors)


def mismatch_error(candidate: Filter, truth: ProcessSpec, N: Optional[int] = None) -> float:
    """
    ||Lambda_L - Psi||^2_Gamma: the excess one-step prediction error of ``candidate`` over sigma^2.
    """
    sigma2 = truth.sigma2
    if truth.kind == ProcessKind.MA1:
        lam = candidate.coeffs
        theta = truth.theta
        cross = (lam[0] + lam[:-1] @ lam[1:]) if lam.size else 0.0
        value = sigma2 * (1 + theta * theta) * (1 + lam @ lam) + 2 * sigma2 * theta * cross - sigma2
        return float(max(value, 0.0))

    true_filter = resolve_filter(truth, N)
    width = max(candidate.order, true_filter.order)
    if width == 0:
        return 0.0
    diff = candidate.padded(width) - true_filter.padded(width)
    gamma = true_ar_autocovariances(true_filter, width - 1).toeplitz(width)
    return float(max(diff @ gamma @ diff, 0.0))


def cost(L: int, N: int, truth: ProcessSpec) -> float:
    """C_N(L) = L sigma^2 / N + mismatch of the best order-L predictor."""
    if L < 0 or N < 1:
        raise DomainError(f"cost needs L >= 0 and N >= 1, got L={L}, N={N}")
    predictors = best_predictors(autocovariances(truth, max(L, 1), N), L) if L else None
    candidate = predictors.filters[L] if predictors else Filter.white_noise()
    return L * truth.sigma2 / N + mismatch_error(candidate, truth, N)


def cost_curve(N: int, truth: ProcessSpec, cap: int) -> np.ndarray:
    """C_N(L) for L = 0..cap, using mismatch(Psi_L) = e_L - sigma^2."""
    if cap < 1:
        raise DomainError(f"cap must be positive, got {cap}")
    errors = levinson(autocovariances(truth, cap, N).values, keep_filters=False).errors
    orders = np.arange(cap + 1)
    return orders * truth.sigma2 / N + np.maximum(errors - truth.sigma2, 0.0)


def _argmin_below_cap(curve: np.ndarray, cap: int, label: str) -> int:
    best = int(np.argmin(curve[1:])) + 1
    if best == cap:
        raise CapTooSmallError(f"{label} attained at the search cap {cap}", cap=cap)
    return best


def universally_optimal_order(N: int, truth: ProcessSpec, cap: Optional[int] = None) -> int:
    """argmin over L in 1..cap of C_N(L); ties go to the smaller order."""
    cap = cap if cap is not None else max(N // 2, 2)
    return _argmin_below_cap(cost_curve(N, truth, cap), cap, "cost minimum")


def bic_cost_minimizer(N: int, truth: ProcessSpec, cap: Optional[int] = None) -> int:
    """argmin of C_N(L) + (log N - 2) L sigma^2 / N."""
    cap = cap if cap is not None else max(N // 2, 2)
    curve = cost_curve(N, truth, cap) + (math.log(N) - 2) * np.arange(cap + 1) * truth.sigma2 / N
    return _argmin_below_cap(curve, cap, "BIC-penalized cost minimum")
