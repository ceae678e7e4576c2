from enum import Enum
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator

from ar_bridge.schemas.process import ProcessSpec
from ar_bridge.schemas.selection import Criterion, CriterionParams


class StudyKind(str, Enum):
    ORDER_SELECTION = "order_selection"
    MISMATCH = "mismatch"


class ExperimentConfig(BaseModel):
    name: str = "study"
    study: StudyKind
    truth: ProcessSpec
    sample_sizes: List[int] = Field(..., min_length=1)
    replications: int = Field(1000, ge=1)
    master_seed: int = Field(0, ge=0, lt=2**64)
    criteria: List[Criterion] = [Criterion.BC, Criterion.AIC, Criterion.BIC]
    params_policy: Union[Literal["paper_default"], CriterionParams] = "paper_default"
    order_buckets: List[Union[int, str]] = [1, 2, 3, ">3"]
    burnin: Optional[int] = Field(None, ge=0)

    @field_validator("sample_sizes")
    def check_sample_sizes(cls, v: List[int]) -> List[int]:
        if any(n < 8 for n in v):
            raise ValueError("sample sizes must be at least 8")
        return v

    @field_validator("order_buckets")
    def check_buckets(cls, v: List[Union[int, str]]) -> List[Union[int, str]]:
        *orders, overflow = v or [None]
        if not (isinstance(overflow, str) and overflow.startswith(">") and overflow[1:].isdigit()):
            raise ValueError("the last bucket must be '>k'")
        k = int(overflow[1:])
        if orders != list(range(1, k + 1)):
            raise ValueError(f"buckets before {overflow!r} must be the orders 1..{k}")
        return v


class ReportRow(BaseModel):
    N: int
    criterion: str
    metric: str
    value: float


class ExperimentReport(BaseModel):
    config: ExperimentConfig
    rows: List[ReportRow]
    histograms: Dict[int, Dict[str, Dict[int, int]]] = {}
    degenerate: Dict[int, int] = {}
    seed: int
    wall_time: float = 0.0

    def value(self, N: int, criterion: str, metric: str) -> float:
        for row in self.rows:
            if row.N == N and row.criterion == criterion and row.metric == metric:
                return row.value
        raise KeyError((N, criterion, metric))
