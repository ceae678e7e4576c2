from enum import Enum
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ar_bridge.schemas.selection import Criterion


class WindowMode(str, Enum):
    EXPANDING = "expanding"
    SLIDING = "sliding"


class PrequentialConfig(BaseModel):
    n0: int = Field(200, ge=2)
    mode: WindowMode = WindowMode.EXPANDING
    window: Optional[int] = Field(None, ge=2)
    avg_window: int = Field(100, ge=1)
    criteria: List[Criterion] = [Criterion.BC, Criterion.AIC, Criterion.BIC]
    params_policy: Literal["paper_default"] = "paper_default"

    @model_validator(mode="after")
    def default_window(self) -> "PrequentialConfig":
        if self.window is None:
            self.window = self.n0
        return self

    @property
    def training_width(self) -> int:
        return self.window if self.window is not None else self.n0
