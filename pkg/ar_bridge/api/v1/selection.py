import numpy as np
from fastapi import APIRouter, Query

from ar_bridge.core.config import get_settings
from ar_bridge.schemas.api import PenaltyCurvesResponse, SelectRequest, ThresholdsResponse
from ar_bridge.schemas.selection import SelectionResult
from ar_bridge.services import criteria as crit
from ar_bridge.services.fit import fit
from ar_bridge.services.numerics import floor_power

router = APIRouter()


@router.post("/select", response_model=SelectionResult)
def select_order(request: SelectRequest):
    """Fit orders 1..L_max to the posted series and report every criterion's choice"""
    data = np.asarray(request.data, dtype=float)
    params = crit.params_for_series(data.size, request.lmax, request.mn, request.zeta)
    return crit.select_orders(fit(data, params.L_max), params, request.criteria)


@router.get("/thresholds", response_model=ThresholdsResponse)
def thresholds(
    n: int = Query(..., ge=2),
    lmax: int = Query(None, ge=1),
    p: float = Query(None, gt=0, lt=1),
):
    """BIC and AIC significance levels, the BC calibration level and h_1..h_L_max"""
    L_max = lmax if lmax is not None else max(1, floor_power(n, get_settings().LMAX_EXPONENT))
    return crit.threshold_table(n, L_max, p)


@router.get("/penalty-curves", response_model=PenaltyCurvesResponse)
def penalty_curves(
    n: int = Query(..., ge=3),
    lmax: int = Query(None, ge=1),
    c: float = Query(None, gt=1),
    shifted: bool = False,
):
    """Penalty curves of BC, AIC, BIC and HQ with their tangent points"""
    L_max = lmax if lmax is not None else max(1, floor_power(n, get_settings().LMAX_EXPONENT))
    c = c if c is not None else get_settings().HQ_C
    curves = crit.penalty_curves(n, L_max, c, shifted=shifted)
    return PenaltyCurvesResponse(
        N=n, L_max=L_max, c=c,
        curves=curves.to_dict(orient="records"),
        tangent_points=dict(zip(("aic", "hq", "bic"), crit.tangent_points(n, L_max, c))),
        discrete_tangent_points=dict(zip(("aic", "hq", "bic"), crit.discrete_tangent_points(n, L_max, c))),
    )
