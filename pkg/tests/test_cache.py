import numpy as np
from numpy.testing import assert_array_equal

import nhqdyn.cache
from nhqdyn.biortho import NormalizationPolicy
from nhqdyn.cache import clear_cache, generate_cache_key, get_or_build_sds, get_or_build_system
from nhqdyn.tolerances import DEFAULT_TOLERANCES

H = np.array([[0.0, 0.5], [1.5, 0.0]])


def counting(monkeypatch, name):
    calls = []
    original = getattr(nhqdyn.cache, name)

    def wrapper(*args, **kwargs):
        calls.append(args)
        return original(*args, **kwargs)

    monkeypatch.setattr(nhqdyn.cache, name, wrapper)
    return calls


def test_key_depends_on_inputs():
    base = generate_cache_key("system", H, normalization="unit")
    assert base == generate_cache_key("system", H.copy(), normalization="unit")
    assert base != generate_cache_key("system", H, normalization="sds")
    assert base != generate_cache_key("system", 2 * H, normalization="unit")
    assert base.startswith("nhqdyn:system:")


def test_system_is_reused(monkeypatch):
    clear_cache()
    calls = counting(monkeypatch, "build_system")
    first = get_or_build_system(H, NormalizationPolicy.UNIT, DEFAULT_TOLERANCES)
    second = get_or_build_system(H, NormalizationPolicy.UNIT, DEFAULT_TOLERANCES)
    assert len(calls) == 1
    assert_array_equal(second.phi, first.phi)

    get_or_build_system(H, NormalizationPolicy.SDS, DEFAULT_TOLERANCES)
    assert len(calls) == 2
    clear_cache()
    get_or_build_system(H, NormalizationPolicy.UNIT, DEFAULT_TOLERANCES)
    assert len(calls) == 3
    clear_cache()


def test_tolerances_enter_the_key(monkeypatch):
    clear_cache()
    calls = counting(monkeypatch, "build_sds")
    first = get_or_build_sds(1.0, 0.5, NormalizationPolicy.SDS, DEFAULT_TOLERANCES)
    again = get_or_build_sds(1.0, 0.5, NormalizationPolicy.SDS, DEFAULT_TOLERANCES)
    assert len(calls) == 1
    assert again.to_dict() == first.to_dict()

    other = DEFAULT_TOLERANCES.with_overrides({"pf_tol": 1e-9})
    get_or_build_sds(1.0, 0.5, NormalizationPolicy.SDS, other)
    assert len(calls) == 2
    clear_cache()
