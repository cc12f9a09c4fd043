import numpy as np
import pytest
from numpy.testing import assert_allclose

from nhqdyn.dynamics import GeneratorKind, Picture
from nhqdyn.errors import DimMismatch, ValidationError
from nhqdyn.pseudofermion import build_sds
from nhqdyn.thermal import (
    MATCHED_PICTURES, MIXED_PAIRINGS, build_thermal, expectation, kms_report,
    kms_residual, kms_tolerance, mixed_kms_report, partition_function
)

from tests.conftest import K_GRID


def unit_operator(rng, n):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return X / np.linalg.norm(X, 2)


class TestPartitionFunction:
    @pytest.mark.parametrize("k", K_GRID)
    def test_sds_closed_form(self, k):
        system = build_sds(1.0, k).system
        expected = 2 * np.cosh(np.sqrt(1 - k ** 2))
        for kind in GeneratorKind:
            state = build_thermal(system, kind, 1.0)
            assert state.Z == pytest.approx(expected, abs=1e-12)
            assert state.Z.imag == 0.0

    def test_high_temperature_limit(self, random_system):
        assert partition_function(random_system, GeneratorKind.H, 1e-8) == pytest.approx(4.0, abs=1e-6)

    @pytest.mark.parametrize("beta", [0.0, -1.0, float("inf")])
    def test_beta_must_be_positive(self, sds_system, beta):
        with pytest.raises(ValidationError) as info:
            build_thermal(sds_system, GeneratorKind.H, beta)
        assert info.value.field == "beta"


class TestExpectation:
    @pytest.mark.parametrize("kind", list(GeneratorKind))
    def test_identity(self, random_system, kind):
        state = build_thermal(random_system, kind, 0.5)
        assert expectation(state, np.eye(4)) == pytest.approx(1.0, abs=1e-12)

    def test_energy_is_log_derivative(self, random_system):
        beta, h = 0.8, 1e-5
        energy = expectation(build_thermal(random_system, GeneratorKind.H, beta), random_system.H)
        log_z = [np.log(partition_function(random_system, GeneratorKind.H, b).real) for b in (beta - h, beta + h)]
        assert energy.real == pytest.approx(-(log_z[1] - log_z[0]) / (2 * h), abs=1e-6)
        assert abs(energy.imag) <= 1e-10

    def test_occupation(self, sds):
        state = build_thermal(sds.system, GeneratorKind.H, 1.0)
        E1 = sds.system.eigenvalues[1].real
        assert expectation(state, sds.algebra.N) == pytest.approx(np.exp(-E1) / state.Z, abs=1e-12)

    def test_dim_mismatch(self, sds_system):
        state = build_thermal(sds_system, GeneratorKind.H0, 1.0)
        with pytest.raises(DimMismatch):
            expectation(state, np.eye(3))


class TestKms:
    def test_identity_operators(self, sds_system):
        assert kms_residual(sds_system, GeneratorKind.H, np.eye(2), np.eye(2), 0.3, 1.0) <= 1e-14

    def test_sds_matched_pairs(self, sds_system, rng):
        A, B = unit_operator(rng, 2), unit_operator(rng, 2)
        for kind, picture in MATCHED_PICTURES.items():
            for t in (0.3, 1.7):
                for beta in (0.5, 2.0):
                    assert kms_residual(sds_system, kind, A, B, t, beta) <= 1e-8, (kind, picture, t, beta)

    def test_random_system_report(self, random_system, rng):
        A, B = unit_operator(rng, 4), unit_operator(rng, 4)
        rows = kms_report(random_system, A, B, (0.3, 1.7), (0.5, 2.0))
        assert len(rows) == 12
        assert all(row["passed"] for row in rows)
        assert {(row["state"], row["picture"]) for row in rows} == {
            ("H0", "standard"), ("H", "psi"), ("Hdagger", "phi")
        }

    def test_tolerance_grows_with_condition(self, sds_system):
        assert kms_tolerance(sds_system) == pytest.approx(1e-8)

    def test_complex_spectrum_still_kms(self, complex_system, rng):
        A, B = unit_operator(rng, 2), unit_operator(rng, 2)
        assert all(row["passed"] for row in kms_report(complex_system, A, B, (0.3,), (1.0,)))

    def test_mixed_pairings_reported(self, sds_system, rng):
        A, B = unit_operator(rng, 2), unit_operator(rng, 2)
        rows = mixed_kms_report(sds_system, A, B, 0.3, 1.0)
        assert len(rows) == len(MIXED_PAIRINGS)
        assert all("passed" not in row for row in rows)
        psi_on_h0 = kms_residual(sds_system, GeneratorKind.H0, A, B, 0.3, 1.0, Picture.PSI)
        assert psi_on_h0 > 1e-6

    def test_dim_mismatch(self, sds_system):
        with pytest.raises(DimMismatch):
            kms_residual(sds_system, GeneratorKind.H, np.eye(3), np.eye(2), 0.3, 1.0)

    def test_weights_match_series(self, sds_system):
        state = build_thermal(sds_system, GeneratorKind.HDAGGER, 1.5)
        values = np.conj(sds_system.eigenvalues)
        weight = (sds_system.psi * np.exp(-1.5 * values)) @ sds_system.phi.conj().T
        assert_allclose(state.weight, weight, atol=1e-14)
