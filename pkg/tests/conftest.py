"""
Shared fixtures: SDS models, random real-spectrum systems and a testing runner
"""
import numpy as np
import pytest

from nhqdyn import create_runner
from nhqdyn.biortho import NormalizationPolicy, build_system, random_real_spectrum_matrix
from nhqdyn.cache import clear_cache
from nhqdyn.pseudofermion import build_sds

K_GRID = (-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9)


@pytest.fixture
def sds():
    """SDS model at g = 1, k = 0.5 with leading components 1/sqrt(2)"""
    return build_sds(1.0, 0.5)


@pytest.fixture
def sds_system(sds):
    return sds.system


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_system(rng):
    """4x4 non-normal matrix with a real, well separated spectrum"""
    return build_system(random_real_spectrum_matrix(rng, 4))


@pytest.fixture
def complex_system():
    """2x2 matrix with eigenvalues 1 +- 0.2i"""
    V = np.array([[1.0, 0.4 + 0.3j], [0.2 - 0.1j, 1.0]])
    H = V @ np.diag([1.0 - 0.2j, 1.0 + 0.2j]) @ np.linalg.inv(V)
    return build_system(H, NormalizationPolicy.UNIT)


@pytest.fixture
def runner():
    clear_cache()
    yield create_runner("testing")
    clear_cache()
