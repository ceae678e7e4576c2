"""
Criteria Service

Order-selection criteria scored on an OrderFitTable:
- AIC, BIC, HQ and the bridge criterion (one-shot, two-step, calibrated)
- the parametricness index
- significance levels and underfitting thresholds
- penalty-curve geometry (curves and tangent points)

Every score vector is indexed by L = 1..L_max (position 0 holds L = 1) and
every argmin breaks ties toward the smaller order.
"""

import logging
import math
from typing import Iterable, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError
from scipy.optimize import brentq

from ar_bridge.core.config import get_settings
from ar_bridge.core.errors import DomainError
from ar_bridge.models import OrderFitTable
from ar_bridge.schemas.selection import Criterion, CriterionParams, SelectionResult
from ar_bridge.services.numerics import beta_cdf, chi2_1_quantile, chi2_1_tail, floor_power
from ar_bridge.services.process import beta_shapes

logger = logging.getLogger(__name__)

PAPER_DEFAULT = "paper_default"
AUTO = "auto"


def select_order(scores: np.ndarray) -> int:
    """1-based position of the first minimum."""
    return int(np.argmin(scores)) + 1


def harmonic_penalty(L_max: int, zeta: float = 1.0) -> np.ndarray:
    """sum_{k=1}^{L} k^-zeta for L = 1..L_max."""
    return np.cumsum(np.arange(1, L_max + 1, dtype=float) ** -zeta)


def _check_N(N: int) -> int:
    if N < 1:
        raise DomainError(f"sample size must be positive, got {N}", N=N)
    return N


def _loglog(N: float) -> float:
    if N <= math.e:
        raise DomainError(f"log log N needs N > e, got {N}", N=N)
    return math.log(math.log(N))


def score_aic(fit: OrderFitTable, N: Optional[int] = None) -> np.ndarray:
    N = _check_N(fit.N if N is None else N)
    return fit.log_e() + 2.0 * np.arange(1, fit.L_max + 1) / N


def score_bic(fit: OrderFitTable, N: Optional[int] = None) -> np.ndarray:
    N = _check_N(fit.N if N is None else N)
    return fit.log_e() + np.arange(1, fit.L_max + 1) * math.log(N) / N


def score_hq(fit: OrderFitTable, N: Optional[int] = None, c: float = 1.1) -> np.ndarray:
    N = _check_N(fit.N if N is None else N)
    if c <= 1:
        raise DomainError(f"HQ constant must exceed 1, got {c}", c=c)
    return fit.log_e() + c * _loglog(N) * np.arange(1, fit.L_max + 1) / N


def score_bc(fit: OrderFitTable, N: Optional[int] = None, L_max: Optional[int] = None) -> np.ndarray:
    """One-shot bridge criterion log e_L + (2 L_max / N) sum_{k<=L} 1/k."""
    N = _check_N(fit.N if N is None else N)
    L_max = fit.L_max if L_max is None else L_max
    if L_max != fit.L_max:
        raise DomainError(f"L_max {L_max} does not match fit table ({fit.L_max})")
    return fit.log_e() + (2.0 * L_max / N) * harmonic_penalty(L_max)


def two_step_bc(fit: OrderFitTable, N: Optional[int], params: CriterionParams) -> Tuple[int, int, np.ndarray]:
    """
    Two-step bridge criterion.

    Step 1 takes the AIC order over 1..L_max; step 2 minimizes
    log e_L + (2 M_N / N) sum_{k<=L} k^-zeta over 1..L_aic. The returned scores
    cover 1..L_max with +inf past L_aic, so their argmin is the chosen order.
    """
    N = _check_N(fit.N if N is None else N)
    if params.L_max != fit.L_max:
        raise DomainError(f"L_max {params.L_max} does not match fit table ({fit.L_max})")
    l_aic = select_order(score_aic(fit, N))
    scores = fit.log_e() + (2.0 * params.M_N / N) * harmonic_penalty(fit.L_max, params.zeta)
    scores[l_aic:] = np.inf
    return select_order(scores), l_aic, scores


def default_params(N: int) -> CriterionParams:
    """L_max = floor(N^(1/3)), M_N = (log N)^0.9, c = 1.1, zeta = 1."""
    if N < 8:
        raise DomainError(f"default parameters need N >= 8, got {N}", N=N)
    settings = get_settings()
    return CriterionParams(
        L_max=floor_power(N, settings.LMAX_EXPONENT),
        M_N=math.log(N) ** settings.MN_EXPONENT,
        hq_c=settings.HQ_C,
        zeta=settings.ZETA,
    )


def auto_lmax(N0: int) -> int:
    """Largest L with L <= floor((N0 - L)^(1/3)): the default rule on the effective length."""
    if N0 < 9:
        raise DomainError(f"series of length {N0} is too short for an automatic L_max", N0=N0)
    exponent = get_settings().LMAX_EXPONENT
    L = floor_power(N0, exponent)
    while L > 1 and L > floor_power(N0 - L, exponent):
        L -= 1
    return L


def parametricness_index(l_bc: int, l_aic: int, l_bic: int) -> float:
    if min(l_bc, l_aic, l_bic) < 1:
        raise DomainError("orders must be positive", l_bc=l_bc, l_aic=l_aic, l_bic=l_bic)
    if l_aic == l_bic:
        return 1.0
    to_aic = abs(l_bc - l_aic)
    return to_aic / (to_aic + abs(l_bc - l_bic))


def bic_significance_level(N: int) -> float:
    """Per-step significance level q = P(chi2_1 > log N) implied by BIC."""
    if N < 2:
        raise DomainError(f"N must be at least 2, got {N}", N=N)
    return chi2_1_tail(math.log(N))


def aic_significance_level() -> float:
    return chi2_1_tail(2.0)


def gain_cdf(h: float, L: int) -> float:
    """
    P(g_L < h) for g_L = -log(1 - psi_{L,L}^2) with (psi_{L,L} + 1)/2 ~ Beta(a, b):
    I_{(1+t)/2}(a, b) - I_{(1-t)/2}(a, b), t = sqrt(1 - e^-h).
    """
    if L < 1:
        raise DomainError(f"order must be positive, got {L}", L=L)
    if h <= 0:
        return 0.0
    t = math.sqrt(-math.expm1(-h))
    a, b = beta_shapes(L)
    return beta_cdf(0.5 * (1 + t), a, b) - beta_cdf(0.5 * (1 - t), a, b)


def underfit_threshold(L: int, p: float, approximate: bool = False) -> float:
    """h_L(p), the p-quantile of g_L; ``approximate`` gives chi2_1^-1(p) / L."""
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}", p=p)
    if L < 1:
        raise DomainError(f"order must be positive, got {L}", L=L)
    if approximate:
        return chi2_1_quantile(p) / L

    upper = 1.0
    while gain_cdf(upper, L) < p:
        upper *= 2.0
    return brentq(lambda h: gain_cdf(h, L) - p, 0.0, upper, xtol=1e-15, rtol=1e-13)


def bc_calibration_level(N: int, L_max: int) -> float:
    """The p solving h_{L_max}(p) = 2/N."""
    return gain_cdf(2.0 / _check_N(N), L_max)


def score_bc_calibrated(fit: OrderFitTable, N: Optional[int] = None, L_max: Optional[int] = None) -> np.ndarray:
    """log e_L + sum_{k<=L} h_k(p) with p calibrated so that h_{L_max}(p) = 2/N."""
    N = _check_N(fit.N if N is None else N)
    L_max = fit.L_max if L_max is None else L_max
    if L_max != fit.L_max:
        raise DomainError(f"L_max {L_max} does not match fit table ({fit.L_max})")
    p = bc_calibration_level(N, L_max)
    thresholds = np.array([underfit_threshold(k, p) for k in range(1, L_max + 1)])
    return fit.log_e() + np.cumsum(thresholds)


def forward_test_order(fit: OrderFitTable, N: Optional[int] = None, q: float = 0.05) -> int:
    """Step up from order 1 while N g_hat_L exceeds the chi2_1 threshold at level q."""
    N = _check_N(fit.N if N is None else N)
    s = chi2_1_quantile(1.0 - q)
    chosen = 1
    for order in range(2, fit.L_max + 1):
        if N * fit.gain_hat[order] <= s:
            break
        chosen = order
    return chosen


def backward_test_order(fit: OrderFitTable, p: float) -> int:
    """Step down from L_max while g_hat_L falls below h_L(p)."""
    chosen = fit.L_max
    for order in range(fit.L_max, 1, -1):
        if fit.gain_hat[order] >= underfit_threshold(order, p):
            break
        chosen = order - 1
    return chosen


def tangent_points(N: int, L_max: int, c: float = 1.1) -> Tuple[float, float, float]:
    """Continuous slope-matching points of BC against AIC, HQ and BIC."""
    loglog = _loglog(N)
    return float(L_max), 2.0 * L_max / (c * loglog), 2.0 * L_max / math.log(N)


def discrete_tangent_points(N: int, L_max: int, c: float = 1.1) -> Tuple[int, int, int]:
    """Largest k whose BC increment 2 L_max / (N k) is at least the competitor's slope."""
    slopes = (2.0, c * _loglog(N), math.log(N))
    increments = 2.0 * L_max / np.arange(1, L_max + 1)
    return tuple(max(1, int(np.sum(increments >= s * (1 - 1e-12)))) for s in slopes)


def penalty_curves(N: int, L_max: int, c: float = 1.1, shifted: bool = False) -> pd.DataFrame:
    """
    J_BC, J_AIC, J_BIC, J_HQ for L = 1..L_max. With ``shifted`` every curve is
    moved to share J_BC's value at L = 1.
    """
    loglog = _loglog(N)
    L = np.arange(1, L_max + 1)
    curves = pd.DataFrame({
        "L": L,
        "J_BC": (2.0 * L_max / N) * harmonic_penalty(L_max),
        "J_AIC": 2.0 * L / N,
        "J_BIC": L * math.log(N) / N,
        "J_HQ": c * loglog * L / N,
    })
    if shifted:
        anchor = curves.loc[0, "J_BC"]
        for column in ("J_AIC", "J_BIC", "J_HQ"):
            curves[column] = curves[column] - curves.loc[0, column] + anchor
    return curves


def score(criterion: Criterion, fit: OrderFitTable, N: int, params: CriterionParams) -> np.ndarray:
    if criterion == Criterion.AIC:
        return score_aic(fit, N)
    if criterion == Criterion.BIC:
        return score_bic(fit, N)
    if criterion == Criterion.HQ:
        return score_hq(fit, N, params.hq_c)
    if criterion == Criterion.BC_ONESHOT:
        return score_bc(fit, N, params.L_max)
    if criterion == Criterion.BC_CALIBRATED:
        return score_bc_calibrated(fit, N, params.L_max)
    return two_step_bc(fit, N, params)[2]


def select_orders(
    fit: OrderFitTable,
    params: CriterionParams,
    criteria: Iterable[Criterion] = (Criterion.BC, Criterion.AIC, Criterion.BIC, Criterion.HQ),
) -> SelectionResult:
    """Score every requested criterion on the same fit table and compute the parametricness index."""
    N = fit.N
    l_bc, l_aic, bc_scores = two_step_bc(fit, N, params)
    l_bic = select_order(score_bic(fit, N))

    scores, chosen = {}, {}
    for criterion in criteria:
        criterion = Criterion(criterion)
        values = bc_scores if criterion == Criterion.BC else score(criterion, fit, N, params)
        scores[criterion] = [float(v) if np.isfinite(v) else None for v in values]
        chosen[criterion] = l_bc if criterion == Criterion.BC else select_order(values)

    return SelectionResult(
        scores=scores,
        chosen=chosen,
        pi=parametricness_index(l_bc, l_aic, l_bic),
        params=params,
        N=N,
        white_noise_score=float(math.log(fit.e_hat[0])),
        degenerate=fit.degenerate,
    )


def params_for_series(N0: int, lmax: Union[int, str] = AUTO, mn: Union[float, str] = AUTO,
                      zeta: Optional[float] = None) -> CriterionParams:
    """Parameters for a series of length N0; ``auto`` applies the default rules on the effective length."""
    L_max = auto_lmax(N0) if lmax == AUTO else int(lmax)
    N = N0 - L_max
    if L_max < 1 or N < 2:
        raise DomainError(f"series of length {N0} is too short for L_max={L_max}", N0=N0, L_max=L_max)
    settings = get_settings()
    M_N = math.log(N) ** settings.MN_EXPONENT if mn == AUTO else float(mn)
    try:
        return CriterionParams(L_max=L_max, M_N=M_N, hq_c=settings.HQ_C,
                               zeta=zeta if zeta is not None else settings.ZETA)
    except ValidationError as e:
        raise DomainError(f"invalid criterion parameters: {e}", L_max=L_max, M_N=M_N)


def threshold_table(N: int, L_max: int, p: Optional[float] = None) -> dict:
    """Significance levels and h_1..h_{L_max}, exact and approximate, at ``p`` or the BC calibration level."""
    calibration = bc_calibration_level(N, L_max)
    level = p if p is not None else calibration
    return {
        "N": N,
        "L_max": L_max,
        "bic_significance_level": bic_significance_level(N),
        "aic_significance_level": aic_significance_level(),
        "bc_calibration_level": calibration,
        "p": level,
        "thresholds": [
            {"L": L, "exact": underfit_threshold(L, level),
             "approximate": underfit_threshold(L, level, approximate=True)}
            for L in range(1, L_max + 1)
        ],
    }
