from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional
import os
from dotenv import load_dotenv

load_dotenv()

class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="BALANCED_LOADS_",
        extra="ignore",
        case_sensitive=False
    )

    APP_NAME: str = "Balanced Loads Toolkit"
    API_PREFIX: str = "/api"
    LOG_LEVEL: str = "INFO"

    # Worker pool for replicates and t-grids (BALANCED_LOADS_WORKERS)
    WORKERS: int = 1

    # Allocator
    EPS0: float = 1.0
    EPS_TOL: float = 1e-10
    EXACT_TOL: float = 1e-8
    MAX_SWEEPS: int = 200_000
    MAX_NEWTON_STEPS: int = 500

    # Tree engine
    MAX_BREAKPOINTS: int = 100_000

    # Densest subgraph
    BRUTEFORCE_MAX_N: int = 22

    # Population dynamics
    POOL_SIZE: int = 100_000
    OBJECTIVE_SAMPLES: int = 1_000_000
    OBJECTIVE_BATCHES: int = 20
    RDE_MAX_SWEEPS: int = 1_000
    RDE_STABLE_SWEEPS: int = 5
    RHO_TOL: float = 1e-3

    # Degree distributions
    POISSON_TAIL: float = 1e-12

    # Redis & Celery
    CELERY_BROKER_URL: str = os.getenv("CELERY_BROKER_URL", "redis://localhost:6379/0")
    CELERY_RESULT_BACKEND: str = os.getenv("CELERY_RESULT_BACKEND", "redis://localhost:6379/0")

    CELERY_ALWAYS_EAGER: bool = False

    # Output directory used by queued experiments
    OUTPUT_DIR: Optional[str] = None

settings = Settings()
