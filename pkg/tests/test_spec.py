import json

import pytest

from nhqdyn.biortho import NormalizationPolicy
from nhqdyn.dynamics import GeneratorKind
from nhqdyn.errors import ParseError, ValidationError
from nhqdyn.spec import parse_spec, sds_spec, serialize_spec, spec_to_dict, with_overrides
from nhqdyn.transition import ALL_LAWS, ProbabilityLaw

SDS_SPEC = {
    "model": {"sds": {"g": 1.0, "k": 0.5}},
    "scenarios": [
        {"name": "oscillating", "initial": "phi0 + phi1", "final": "psi0", "grid": "0:10:200"},
        {"initial": "phi0", "final": "psi1", "grid": [0, 1, 2], "generator": "Hdagger"},
    ],
}


def parse(data):
    return parse_spec(json.dumps(data))


class TestParse:
    def test_minimal_sds(self):
        spec = parse(SDS_SPEC)
        assert spec.model.kind == "sds"
        assert spec.model.k == 0.5
        assert spec.normalization is NormalizationPolicy.SDS
        assert spec.laws == ALL_LAWS
        assert spec.seed == 0
        first, second = spec.scenarios
        assert first.generator is GeneratorKind.H
        assert len(first.grid) == 201
        assert second.name == "s1"
        assert second.generator is GeneratorKind.HDAGGER
        assert second.grid == (0.0, 1.0, 2.0)

    def test_matrix_defaults_to_unit(self):
        spec = parse({"model": {"matrix": [[1, [0, 0.2]], [[0, 0.2], -1]]}})
        assert spec.normalization is NormalizationPolicy.UNIT
        assert spec.model.dim == 2
        assert spec.model.matrix[0][1] == 0.2j

    def test_pf_model(self):
        spec = parse({"model": {"pf": {"a": [[0, 1], [0, 0]], "b": [[0, 0], [1, 0]], "omega": 2.0}}})
        assert spec.model.kind == "pf"
        assert spec.model.omega == 2.0
        assert spec.model.shift == 0.0

    def test_grid_object(self):
        data = dict(SDS_SPEC, scenarios=[
            {"name": "a", "initial": "phi0", "final": "phi1", "grid": {"start": 0, "stop": 2, "steps": 4}}
        ])
        assert parse(data).scenarios[0].grid == (0.0, 0.5, 1.0, 1.5, 2.0)

    def test_thermal_block(self):
        spec = parse(dict(SDS_SPEC, thermal={"beta": [0.5, 2]}))
        assert spec.thermal.betas == (0.5, 2.0)
        assert spec.thermal.times == (0.3, 1.7)

    def test_tolerances(self):
        spec = parse(dict(SDS_SPEC, tolerances={"kms_tol": 1e-9}))
        assert spec.tolerance_table().kms_tol == 1e-9


class TestErrors:
    def test_bad_json_carries_line(self):
        with pytest.raises(ParseError) as info:
            parse_spec('{\n  "model": {\n  ,\n}', "exp.json")
        assert info.value.line == 3
        assert info.value.path == "exp.json"
        assert info.value.exit_code == 2

    @pytest.mark.parametrize("data, field", [
        ({}, "model"),
        ({"model": {"sds": {"g": 1, "k": 1.2}}}, "model.sds.k"),
        ({"model": {"sds": {"g": 1}}}, "model.sds.k"),
        ({"model": {"sds": {"g": 1, "k": 0.1}, "matrix": [[1]]}}, "model"),
        ({"model": {"sds": {"g": 1, "k": 0.1}}, "colour": 1}, "colour"),
        ({"model": {"sds": {"g": 1, "k": 0.1}}, "laws": ["standard", "fancy"]}, "laws[1]"),
        ({"model": {"sds": {"g": 1, "k": 0.1}}, "laws": ["psi", "psi"]}, "laws[1]"),
        ({"model": {"sds": {"g": 1, "k": 0.1}}, "tolerances": {"nope": 1}}, "tolerances.nope"),
        ({"model": {"sds": {"g": 1, "k": 0.1}}, "seed": -1}, "seed"),
        ({"model": {"sds": {"g": 1, "k": 0.1}}, "normalization": "weird"}, "normalization"),
        ({"model": {"sds": {"g": 1, "k": 0.1}}, "thermal": {"beta": [0]}}, "thermal.beta"),
        ({"model": {"sds": {"g": 1, "k": 0.1}},
          "scenarios": [{"initial": "phi2", "final": "phi0", "grid": "0:1:2"}]}, "scenarios[0].initial"),
        ({"model": {"sds": {"g": 1, "k": 0.1}},
          "scenarios": [{"initial": "phi0", "final": "phi0", "grid": "0:1:2", "generator": "G"}]},
         "scenarios[0].generator"),
        ({"model": {"sds": {"g": 1, "k": 0.1}},
          "scenarios": [{"initial": "phi0", "final": "phi0"}]}, "scenarios[0].grid"),
    ])
    def test_validation_field(self, data, field):
        with pytest.raises(ValidationError) as info:
            parse(data)
        assert info.value.field == field

    def test_duplicate_scenario_names(self):
        scenario = {"name": "x", "initial": "phi0", "final": "phi1", "grid": "0:1:2"}
        with pytest.raises(ValidationError) as info:
            parse(dict(SDS_SPEC, scenarios=[scenario, scenario]))
        assert info.value.field == "scenarios[1].name"


class TestRoundTrip:
    def test_sds(self):
        spec = parse(dict(SDS_SPEC, thermal={"beta": [1.0]}, tolerances={"pf_tol": 1e-11},
                          outputs={"dir": "out/sds", "formats": ["csv"]}, seed=3, include_hdagger=True))
        assert parse_spec(serialize_spec(spec)) == spec

    def test_matrix(self):
        spec = parse({
            "model": {"matrix": [[1, [0.5, -0.25]], [0, -1]]},
            "laws": ["phi", "standard"],
            "scenarios": [{"name": "a", "initial": "(1+2i)*e0 - phi1", "final": "psi1", "grid": "0:3:6"}],
        })
        assert parse_spec(serialize_spec(spec)) == spec

    def test_serialization_is_canonical(self):
        text = serialize_spec(parse(SDS_SPEC))
        assert serialize_spec(parse_spec(text)) == text
        assert list(json.loads(text)) == sorted(json.loads(text))


class TestOverrides:
    def test_grid_laws_and_generator(self):
        spec = with_overrides(parse(SDS_SPEC), grid="0:1:2", laws=(ProbabilityLaw.PSI,),
                              generator=GeneratorKind.H0, seed=9, out_dir="elsewhere")
        assert all(s.grid == (0.0, 0.5, 1.0) for s in spec.scenarios)
        assert all(s.generator is GeneratorKind.H0 for s in spec.scenarios)
        assert spec.laws == (ProbabilityLaw.PSI,)
        assert spec.seed == 9
        assert spec.outputs.dir == "elsewhere"

    def test_tolerances_merge(self):
        base = parse(dict(SDS_SPEC, tolerances={"kms_tol": 1e-9}))
        spec = with_overrides(base, tolerances={"pf_tol": 1e-11})
        assert dict(spec.tolerances) == {"kms_tol": 1e-9, "pf_tol": 1e-11}

    def test_bad_tolerance_override(self):
        with pytest.raises(ValidationError):
            with_overrides(parse(SDS_SPEC), tolerances={"speed": 1.0})

    def test_sds_shorthand(self):
        spec = sds_spec(1, 0.5)
        assert spec_to_dict(spec)["model"] == {"sds": {"g": 1.0, "k": 0.5}}
        with pytest.raises(ValidationError):
            sds_spec(1, 1.5)
