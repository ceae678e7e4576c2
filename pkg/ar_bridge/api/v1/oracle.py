from fastapi import APIRouter

from ar_bridge.core.errors import CapTooSmallError
from ar_bridge.models import Filter
from ar_bridge.schemas.api import MismatchRequest, MismatchResponse
from ar_bridge.services import process

router = APIRouter()


@router.post("/mismatch", response_model=MismatchResponse)
def mismatch(request: MismatchRequest):
    """Mismatch error of a candidate filter against a known truth, with the cost oracle when n is given"""
    candidate = Filter(request.coeffs, request.truth.sigma2)
    response = MismatchResponse(
        mismatch=process.mismatch_error(candidate, request.truth, request.n),
        order=candidate.order,
    )
    if request.n is None:
        return response

    response.cost = process.cost(candidate.order, request.n, request.truth)
    try:
        response.optimal_order = process.universally_optimal_order(request.n, request.truth)
        response.bic_cost_minimizer = process.bic_cost_minimizer(request.n, request.truth)
    except CapTooSmallError:
        pass
    return response
