import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    """Base configuration"""
    # Dimension cap for the dense kernel
    MAX_DIM = int(os.getenv("NHQDYN_MAX_DIM", "64"))

    # Logging
    LOG_LEVEL = os.getenv("NHQDYN_LOG_LEVEL", "INFO")

    # Output
    OUT_DIR = os.getenv("NHQDYN_OUT_DIR", "out")

    # Scenario fan-out
    WORKERS = int(os.getenv("NHQDYN_WORKERS", "4"))

    # What to do when cond(S_phi) exceeds COND_LIMIT: "warn" or "raise"
    ILL_CONDITIONED_ACTION = os.getenv("NHQDYN_ILL_CONDITIONED", "warn")

    # Eigensolver and metric tolerances
    EIG_TOL = 1e-10
    HERM_TOL = 1e-10
    GAP_TOL = 1e-8
    PSD_FLOOR = 1e-12
    BI_TOL = 1e-9
    REAL_TOL = 1e-8
    MATCH_TOL = 1e-7
    COND_LIMIT = 1e8
    SA_TOL = 1e-9

    # Dynamics and transition tolerances
    XVAL_TOL = 1e-9
    ZERO_TOL = 1e-14
    RANGE_SLACK = 1e-12
    DISCRIM_THRESHOLD = 1e-6

    # Thermal and pseudo-fermion tolerances
    KMS_TOL = 1e-8
    PF_TOL = 1e-10

    # System build cache
    CACHE_THRESHOLD = 32


class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True
    LOG_LEVEL = os.getenv("NHQDYN_LOG_LEVEL", "DEBUG")


class ProductionConfig(Config):
    """Production configuration"""
    DEBUG = False


class TestingConfig(Config):
    """Testing configuration"""
    DEBUG = False
    LOG_LEVEL = "WARNING"
    WORKERS = 1


config = {
    "development": DevelopmentConfig,
    "production": ProductionConfig,
    "testing": TestingConfig,
    "default": ProductionConfig
}
