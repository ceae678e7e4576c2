from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator


class ProcessKind(str, Enum):
    FINITE_AR = "finite_ar"
    GROWING_AR = "growing_ar"
    MA1 = "ma1"


class ProcessSpec(BaseModel):
    """Description of a data-generating process; serializes to the documented JSON shape."""

    kind: ProcessKind
    coeffs: List[float] = []
    sigma2: float = Field(1.0, gt=0)
    theta: Optional[float] = None
    decay: float = 0.7
    order_exponent: float = Field(0.4, gt=0)
    rule: str = "geometric"

    @model_validator(mode="after")
    def check_kind_fields(self) -> "ProcessSpec":
        if self.kind == ProcessKind.MA1 and self.theta is None:
            raise ValueError("an ma1 process needs theta")
        if self.kind == ProcessKind.GROWING_AR and not 0 < abs(self.decay) < 1:
            raise ValueError("growing_ar decay must satisfy 0 < |decay| < 1")
        return self

    @classmethod
    def finite_ar(cls, coeffs: List[float], sigma2: float = 1.0) -> "ProcessSpec":
        return cls(kind=ProcessKind.FINITE_AR, coeffs=list(coeffs), sigma2=sigma2)

    @classmethod
    def growing_ar(cls, decay: float = 0.7, order_exponent: float = 0.4, sigma2: float = 1.0) -> "ProcessSpec":
        return cls(kind=ProcessKind.GROWING_AR, decay=decay, order_exponent=order_exponent, sigma2=sigma2)

    @classmethod
    def ma1(cls, theta: float, sigma2: float = 1.0) -> "ProcessSpec":
        return cls(kind=ProcessKind.MA1, theta=theta, sigma2=sigma2)
