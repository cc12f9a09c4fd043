"""
Runner factory
"""
import logging
import os

from config import config
from nhqdyn.cache import init_cache
from nhqdyn.runner import Runner
from nhqdyn.tolerances import Tolerances


def create_runner(config_name=None):
    """
    Create and configure an experiment runner

    Args:
        config_name: Configuration name ('development', 'production', 'testing', or None for auto-detect)

    Returns:
        Configured Runner
    """
    if config_name is None:
        config_name = os.getenv("NHQDYN_ENV", "production")

    cfg = config.get(config_name, config["default"])

    # Setup logging
    level = getattr(logging, str(cfg.LOG_LEVEL).upper(), logging.INFO)
    logging.basicConfig(level=level)
    logging.getLogger("nhqdyn").setLevel(level)

    init_cache(cfg.CACHE_THRESHOLD)

    return Runner(cfg, Tolerances.from_config(cfg))
