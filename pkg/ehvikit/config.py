import os

from ehvikit.core.montecarlo import DEFAULT_CHUNK_SIZE
from ehvikit.models.kriging import DEFAULT_BUDGET, DEFAULT_NUGGET, DEFAULT_VARIANCE_FLOOR
from ehvikit.services.speed import DEFAULT_REPS, PREDICTION_MU, PREDICTION_SIGMA


class Config:
    # Base config shared by all environments
    LOG_LEVEL = os.environ.get("EHVIKIT_LOG_LEVEL") or "INFO"

    # Kriging surrogate
    KRIGING_NUGGET = float(os.environ.get("EHVIKIT_KRIGING_NUGGET") or DEFAULT_NUGGET)
    KRIGING_BUDGET = int(os.environ.get("EHVIKIT_KRIGING_BUDGET") or DEFAULT_BUDGET)
    VARIANCE_FLOOR = float(
        os.environ.get("EHVIKIT_VARIANCE_FLOOR") or DEFAULT_VARIANCE_FLOOR
    )
    FIT_WORKERS = int(os.environ.get("EHVIKIT_FIT_WORKERS") or 1)

    # Infill search, criterion evaluations per MOBGO iteration
    INNER_BUDGET = int(os.environ.get("EHVIKIT_INNER_BUDGET") or 2000)

    # Monte Carlo oracles
    MC_SAMPLES = int(os.environ.get("EHVIKIT_MC_SAMPLES") or 1_000_000)
    MC_WORKERS = int(os.environ.get("EHVIKIT_MC_WORKERS") or 1)
    MC_CHUNK_SIZE = int(os.environ.get("EHVIKIT_MC_CHUNK_SIZE") or DEFAULT_CHUNK_SIZE)
    Z_THRESHOLD = float(os.environ.get("EHVIKIT_Z_THRESHOLD") or 4.0)

    # Speed benchmark
    BENCH_REPS = int(os.environ.get("EHVIKIT_BENCH_REPS") or DEFAULT_REPS)
    BENCH_MU = PREDICTION_MU
    BENCH_SIGMA = PREDICTION_SIGMA


class DevelopmentConfig(Config):
    LOG_LEVEL = os.environ.get("EHVIKIT_LOG_LEVEL") or "DEBUG"


class ProductionConfig(Config):
    LOG_LEVEL = os.environ.get("EHVIKIT_LOG_LEVEL") or "WARNING"
    FIT_WORKERS = int(os.environ.get("EHVIKIT_FIT_WORKERS") or os.cpu_count() or 1)


class TestingConfig(Config):
    LOG_LEVEL = "DEBUG"
    KRIGING_BUDGET = 200
    INNER_BUDGET = 300
    MC_SAMPLES = 100_000
    BENCH_REPS = 2


config = {
    "development": DevelopmentConfig,
    "testing": TestingConfig,
    "production": ProductionConfig,
    "default": Config,
}
