from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field, field_validator

from ar_bridge.schemas.process import ProcessSpec
from ar_bridge.schemas.selection import Criterion


class SelectRequest(BaseModel):
    data: List[float] = Field(..., min_length=9)
    criteria: List[Criterion] = [Criterion.BC, Criterion.AIC, Criterion.BIC, Criterion.HQ]
    lmax: Union[int, str] = "auto"
    mn: Union[float, str] = "auto"
    zeta: Optional[float] = None

    @field_validator("lmax", "mn")
    def check_auto(cls, v):
        if isinstance(v, str) and v != "auto":
            raise ValueError("must be a number or 'auto'")
        return v


class ThresholdRow(BaseModel):
    L: int
    exact: float
    approximate: float


class ThresholdsResponse(BaseModel):
    N: int
    L_max: int
    bic_significance_level: float
    aic_significance_level: float
    bc_calibration_level: float
    p: float
    thresholds: List[ThresholdRow]


class PenaltyCurveRow(BaseModel):
    L: int
    J_BC: float
    J_AIC: float
    J_BIC: float
    J_HQ: float


class PenaltyCurvesResponse(BaseModel):
    N: int
    L_max: int
    c: float
    curves: List[PenaltyCurveRow]
    tangent_points: Dict[str, float]
    discrete_tangent_points: Dict[str, int]


class MismatchRequest(BaseModel):
    truth: ProcessSpec
    coeffs: List[float] = []
    n: Optional[int] = Field(None, ge=1)


class MismatchResponse(BaseModel):
    mismatch: float
    order: int
    cost: Optional[float] = None
    optimal_order: Optional[int] = None
    bic_cost_minimizer: Optional[int] = None
