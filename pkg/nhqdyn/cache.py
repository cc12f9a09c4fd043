"""
Caching utilities for built systems
"""
import hashlib
import json
import logging

import numpy as np
from cachelib import SimpleCache

from nhqdyn.biortho import build_system
from nhqdyn.pseudofermion import build_sds

logger = logging.getLogger(__name__)

# Initialize cache instance (resized in the runner factory)
cache = SimpleCache(threshold=32, default_timeout=0)


def init_cache(threshold):
    """Replace the cache with one holding up to threshold systems"""
    global cache
    cache = SimpleCache(threshold=threshold, default_timeout=0)


def generate_cache_key(prefix, matrix=None, **kwargs):
    """
    Generate a consistent cache key from parameters

    Args:
        prefix: Cache key prefix (e.g., 'system', 'sds')
        matrix: Optional matrix whose bytes enter the key
        **kwargs: Additional parameters to include in cache key
    """
    digest = hashlib.md5()
    if matrix is not None:
        M = np.ascontiguousarray(matrix, dtype=np.complex128)
        digest.update(str(M.shape).encode())
        digest.update(M.tobytes())
    params_str = json.dumps(sorted(kwargs.items()), sort_keys=True, default=str)
    digest.update(params_str.encode())
    return f"nhqdyn:{prefix}:{digest.hexdigest()[:16]}"


def get_or_build_system(H, normalization, tol):
    """Build the biorthogonal system of H, reusing a cached build when possible"""
    key = generate_cache_key("system", H, normalization=normalization.value,
                             tolerances=tol.to_dict())
    system = cache.get(key)
    if system is not None:
        logger.debug(f"Cache hit for {key}")
        return system
    system = build_system(H, normalization, tol)
    cache.set(key, system)
    return system


def get_or_build_sds(g, k, policy, tol):
    """SDS model counterpart of get_or_build_system"""
    key = generate_cache_key("sds", g=g, k=k, policy=policy.value, tolerances=tol.to_dict())
    model = cache.get(key)
    if model is not None:
        logger.debug(f"Cache hit for {key}")
        return model
    model = build_sds(g, k, policy, tol)
    cache.set(key, model)
    return model


def clear_cache():
    cache.clear()
