from functools import lru_cache
from typing import Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="AR_BRIDGE_", env_file=".env", extra="ignore")

    # Reproducibility
    SEED: Optional[int] = None

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "%(asctime)s - %(levelname)s - %(message)s"

    # Criterion defaults
    HQ_C: float = 1.1
    LMAX_EXPONENT: float = 1.0 / 3.0
    MN_EXPONENT: float = 0.9
    ZETA: float = 1.0

    # Simulation
    BURNIN_MIN: int = 1000
    BURNIN_FACTOR: int = 10

    # Numerical tolerances
    STABILITY_TOL: float = 1e-10
    JITTER_SCALE: float = 1e-10
    EFLOOR_SCALE: float = 1e-12

    # Monte Carlo
    THREADS: int = 1

    # Application
    PROJECT_NAME: str = "AR Bridge Criterion Toolkit"
    VERSION: str = "1.0.0"
    API_V1_STR: str = "/api/v1"

    # CORS
    BACKEND_CORS_ORIGINS: list[str] = [
        "http://localhost:3000",
        "*"
    ]

    @field_validator("HQ_C")
    def check_hq_c(cls, v: float) -> float:
        if v <= 1:
            raise ValueError("HQ_C must exceed 1")
        return v

    @field_validator("THREADS")
    def check_threads(cls, v: int) -> int:
        if v < 1:
            raise ValueError("THREADS must be at least 1")
        return v


@lru_cache
def get_settings() -> Settings:
    """Settings are read from the environment on first use, not at import."""
    return Settings()
