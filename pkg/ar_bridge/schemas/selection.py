from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator


class Criterion(str, Enum):
    BC = "bc"
    BC_ONESHOT = "bc_oneshot"
    BC_CALIBRATED = "bc_calibrated"
    AIC = "aic"
    BIC = "bic"
    HQ = "hq"


class CriterionParams(BaseModel):
    L_max: int = Field(..., ge=1)
    M_N: float = Field(..., gt=0)
    hq_c: float = 1.1
    zeta: float = Field(1.0, gt=0)
    candidate_floor: int = 1

    @field_validator("hq_c")
    def check_hq_c(cls, v: float) -> float:
        if v <= 1:
            raise ValueError("hq_c must exceed 1")
        return v

    @field_validator("candidate_floor")
    def check_candidate_floor(cls, v: int) -> int:
        if v != 1:
            raise ValueError("candidate_floor is fixed at 1")
        return v


class SelectionResult(BaseModel):
    scores: Dict[Criterion, List[Optional[float]]]
    chosen: Dict[Criterion, int]
    pi: float = Field(..., ge=0, le=1)
    params: CriterionParams
    N: int
    white_noise_score: float
    degenerate: bool = False
