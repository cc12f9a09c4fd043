import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from nhqdyn.biortho import build_system, random_real_spectrum_matrix
from nhqdyn.errors import DimMismatch
from nhqdyn.linalg import operator_norm
from nhqdyn.metric import (
    MetricKind, adjoint, gram, inner, inner_half_form, is_selfadjoint, norm, norm_bounds
)


def random_operator(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


class TestInner:
    def test_standard_orthogonal(self, sds_system):
        assert inner(sds_system, MetricKind.STANDARD, [1.0, 0.0], [0.0, 1.0]) == 0

    def test_psi_diagonal_is_one(self, sds_system):
        for a in range(2):
            phi_a = sds_system.phi[:, a]
            assert inner(sds_system, MetricKind.PSI, phi_a, phi_a) == pytest.approx(1.0, abs=1e-12)

    def test_phi_vacuum(self, sds_system):
        phi0 = sds_system.phi[:, 0]
        assert inner(sds_system, MetricKind.PHI, phi0, phi0) == pytest.approx(5.0, abs=1e-12)

    def test_conjugate_linear_in_first_argument(self, random_system, rng):
        f, g = random_operator(rng, 4)[:, :2].T
        c = 0.3 - 1.2j
        for kind in MetricKind:
            assert inner(random_system, kind, c * f, g) == pytest.approx(np.conj(c) * inner(random_system, kind, f, g))

    def test_half_form_agrees(self, random_system, rng):
        f, g = random_operator(rng, 4)[:, :2].T
        for kind in MetricKind:
            assert inner_half_form(random_system, kind, f, g) == pytest.approx(
                inner(random_system, kind, f, g), rel=1e-10)

    def test_dim_mismatch(self, sds_system):
        with pytest.raises(DimMismatch):
            inner(sds_system, MetricKind.PHI, [1.0, 0.0, 0.0], [1.0, 0.0])


class TestNorm:
    def test_two_term_sum(self, random_system):
        f = random_system.phi[:, 0] + random_system.phi[:, 2]
        assert norm(random_system, MetricKind.PSI, f) == pytest.approx(np.sqrt(2.0), abs=1e-10)

    def test_zero(self, sds_system):
        for kind in MetricKind:
            assert norm(sds_system, kind, np.zeros(2)) == 0.0

    def test_gram_matches_kind(self, sds_system):
        assert_allclose(gram(sds_system, MetricKind.STANDARD), np.eye(2))
        assert gram(sds_system, MetricKind.PHI) is sds_system.S_phi
        assert gram(sds_system, MetricKind.PSI) is sds_system.S_psi

    def test_norm_bounds(self, random_system, rng):
        lower, upper = norm_bounds(random_system)
        for _ in range(20):
            f = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            value = norm(random_system, MetricKind.PHI, f)
            base = np.linalg.norm(f)
            assert lower * base <= value * (1 + 1e-12)
            assert value <= upper * base * (1 + 1e-12)


class TestAdjoint:
    def test_identity(self, random_system):
        for kind in MetricKind:
            assert_allclose(adjoint(random_system, kind, np.eye(4)), np.eye(4), atol=1e-12)

    def test_sds_sharp(self, sds_system):
        assert_allclose(adjoint(sds_system, MetricKind.PSI, sds_system.H), sds_system.H, atol=1e-12)

    def test_sds_flat_display(self, sds_system):
        flat = adjoint(sds_system, MetricKind.PHI, sds_system.H)
        assert flat[0, 1] == pytest.approx(-4.5, abs=1e-12)
        assert flat[1, 0] == pytest.approx(-1.0 / 6.0, abs=1e-12)
        assert_allclose(np.diag(flat), 0.0, atol=1e-12)

    def test_selfadjointness(self, sds_system):
        assert is_selfadjoint(sds_system, MetricKind.PSI, sds_system.H)[0]
        assert is_selfadjoint(sds_system, MetricKind.PHI, sds_system.Hdag)[0]
        ok, residual = is_selfadjoint(sds_system, MetricKind.STANDARD, sds_system.H)
        assert not ok
        assert residual > 0.5

    def test_wrong_dimension(self, sds_system):
        with pytest.raises(DimMismatch):
            adjoint(sds_system, MetricKind.PHI, np.eye(3))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), dim=st.integers(2, 6))
def test_adjoint_calculus(seed, dim):
    rng = np.random.default_rng(seed)
    system = build_system(random_real_spectrum_matrix(rng, dim, perturbation=0.3))
    X, Y = random_operator(rng, dim), random_operator(rng, dim)
    f, g = random_operator(rng, dim)[:, :2].T
    scale = system.condition ** 2 * operator_norm(X) * operator_norm(Y)
    limit = 1e-9 * max(1.0, scale)

    for kind in MetricKind:
        Xa = adjoint(system, kind, X)
        assert operator_norm(adjoint(system, kind, Xa) - X) <= limit
        assert operator_norm(adjoint(system, kind, X @ Y) - adjoint(system, kind, Y) @ Xa) <= limit
        assert abs(inner(system, kind, X @ f, g) - inner(system, kind, f, Xa @ g)) <= limit * 10

    bridge = system.S_psi @ system.S_psi @ adjoint(system, MetricKind.PSI, X) @ system.S_phi @ system.S_phi
    assert operator_norm(adjoint(system, MetricKind.PHI, X) - bridge) <= limit * system.condition ** 2
    assert is_selfadjoint(system, MetricKind.PSI, system.H)[1] <= limit * operator_norm(system.H)
    assert is_selfadjoint(system, MetricKind.PHI, system.Hdag)[1] <= limit * operator_norm(system.H)
