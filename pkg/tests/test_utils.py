import numpy as np
import pytest
from numpy.testing import assert_allclose

from nhqdyn.errors import IndexOutOfRange, ValidationError
from nhqdyn.utils import (
    check_grid, complex_from_wire, complex_to_wire, matrix_from_wire, matrix_to_wire,
    parse_grid, parse_state
)


class TestWire:
    def test_complex(self):
        assert complex_to_wire(1 - 2j) == [1.0, -2.0]
        assert complex_from_wire([1, -2], "x") == 1 - 2j
        assert complex_from_wire(0.5, "x") == 0.5

    @pytest.mark.parametrize("value", [True, "1", [1], [1, 2, 3], None])
    def test_complex_rejects(self, value):
        with pytest.raises(ValidationError) as info:
            complex_from_wire(value, "model.matrix[0][1]")
        assert info.value.field == "model.matrix[0][1]"

    def test_matrix(self):
        rows = [[1, [0, 1]], [[0, -1], 2]]
        decoded = matrix_from_wire(rows, "m")
        assert decoded == ((1 + 0j, 1j), (-1j, 2 + 0j))
        assert matrix_to_wire(decoded) == [[[1.0, 0.0], [0.0, 1.0]], [[0.0, -1.0], [2.0, 0.0]]]

    def test_matrix_must_be_square(self):
        with pytest.raises(ValidationError) as info:
            matrix_from_wire([[1, 2], [3]], "model.matrix")
        assert info.value.field == "model.matrix[1]"


class TestGrid:
    def test_sugar_is_inclusive(self):
        assert parse_grid("0:1:4") == (0.0, 0.25, 0.5, 0.75, 1.0)

    @pytest.mark.parametrize("text", ["0:1", "a:1:4", "1:0:4", "0:1:0", "0:inf:3"])
    def test_bad_sugar(self, text):
        with pytest.raises(ValidationError):
            parse_grid(text)

    def test_explicit(self):
        assert check_grid([0, 0.5, 2]) == (0.0, 0.5, 2.0)

    @pytest.mark.parametrize("values", [[], [0, 0], [1, 0], [0, float("nan")], ["x"]])
    def test_explicit_rejects(self, values):
        with pytest.raises(ValidationError):
            check_grid(values)


class TestStateExpressions:
    def test_sum(self):
        expression = parse_state("phi0 + phi1")
        assert expression.terms == ((1 + 0j, "phi", 0), (1 + 0j, "phi", 1))

    def test_coefficients(self):
        expression = parse_state("2*phi0 - (0.5+1i)*psi1 + 0.25 e1")
        assert expression.terms == (
            (2 + 0j, "phi", 0), (-0.5 - 1j, "psi", 1), (0.25 + 0j, "e", 1),
        )

    def test_leading_sign(self):
        assert parse_state("-psi0").terms == ((-1 + 0j, "psi", 0),)

    @pytest.mark.parametrize("text", ["", "phi", "phi0 phi1", "chi0", "phi0 +", "(1+)*phi0"])
    def test_rejects(self, text):
        with pytest.raises(ValidationError):
            parse_state(text)

    def test_dimension_check(self):
        with pytest.raises(ValidationError):
            parse_state("phi2", dim=2)

    def test_resolve(self, sds_system):
        vector = parse_state("phi0 + phi1").resolve(sds_system)
        assert_allclose(vector, sds_system.phi[:, 0] + sds_system.phi[:, 1])
        assert_allclose(parse_state("psi1").resolve(sds_system), sds_system.psi[:, 1])
        assert_allclose(parse_state("1i*e0").resolve(sds_system), 1j * sds_system.e[:, 0])

    def test_resolve_out_of_range(self, sds_system):
        with pytest.raises(IndexOutOfRange):
            parse_state("phi3").resolve(sds_system)

    def test_coefficient_vector_on_phi_basis(self, sds_system):
        vector = parse_state("phi0 + phi1").resolve(sds_system)
        assert_allclose(sds_system.psi.conj().T @ vector, [1.0, 1.0], atol=1e-12)
        assert np.all(np.isfinite(vector))
