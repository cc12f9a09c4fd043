"""
Experiment spec documents: JSON parsing, validation and canonical serialization
"""
import json
import re
from dataclasses import dataclass, field, replace

from nhqdyn.biortho import NormalizationPolicy
from nhqdyn.dynamics import GeneratorKind
from nhqdyn.errors import ParseError, ValidationError
from nhqdyn.tolerances import DEFAULT_TOLERANCES
from nhqdyn.transition import ALL_LAWS, ProbabilityLaw
from nhqdyn.utils import (
    check_grid, grid_from_range, matrix_from_wire, matrix_to_wire, parse_grid, parse_state
)

TOP_LEVEL_KEYS = {
    "model", "normalization", "scenarios", "laws", "outputs", "tolerances",
    "thermal", "seed", "include_hdagger",
}
OUTPUT_FORMATS = ("csv", "json")
SCENARIO_NAME = re.compile(r"^[A-Za-z0-9_-]+$")


@dataclass(frozen=True)
class ModelSpec:
    """One of an inline matrix, the SDS model or a pseudo-fermion pair"""
    kind: str
    matrix: tuple = None
    g: float = None
    k: float = None
    a: tuple = None
    b: tuple = None
    omega: float = None
    shift: float = None

    @property
    def dim(self):
        return len(self.matrix) if self.kind == "matrix" else 2


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    initial: str
    final: str
    generator: GeneratorKind
    grid: tuple


@dataclass(frozen=True)
class ThermalSpec:
    betas: tuple
    times: tuple


@dataclass(frozen=True)
class OutputSpec:
    dir: str = None
    formats: tuple = OUTPUT_FORMATS


@dataclass(frozen=True)
class ExperimentSpec:
    model: ModelSpec
    normalization: NormalizationPolicy
    scenarios: tuple = ()
    laws: tuple = ALL_LAWS
    outputs: OutputSpec = field(default_factory=OutputSpec)
    tolerances: tuple = ()
    thermal: ThermalSpec = None
    seed: int = 0
    include_hdagger: bool = False

    def tolerance_table(self, base=DEFAULT_TOLERANCES):
        return base.with_overrides(dict(self.tolerances))


def _require(mapping, key, where):
    if key not in mapping:
        raise ValidationError(f"Missing required field '{key}'", field=f"{where}.{key}".lstrip("."))
    return mapping[key]


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError("Expected a number", field=where)
    return float(value)


def _object(value, where):
    if not isinstance(value, dict):
        raise ValidationError("Expected an object", field=where)
    return value


def _parse_model(raw):
    raw = _object(raw, "model")
    kinds = [key for key in ("matrix", "sds", "pf") if key in raw]
    if len(kinds) != 1 or len(raw) != 1:
        raise ValidationError("Model must have exactly one of 'matrix', 'sds' or 'pf'", field="model")
    kind = kinds[0]

    if kind == "matrix":
        return ModelSpec(kind="matrix", matrix=matrix_from_wire(raw["matrix"], "model.matrix"))

    if kind == "sds":
        body = _object(raw["sds"], "model.sds")
        g = _number(_require(body, "g", "model.sds"), "model.sds.g")
        k = _number(_require(body, "k", "model.sds"), "model.sds.k")
        if not -1.0 < k < 1.0:
            raise ValidationError(f"Parameter out of range: k must lie in (-1, 1), got {k}",
                                  field="model.sds.k")
        if g == 0.0:
            raise ValidationError("Parameter out of range: g must be nonzero", field="model.sds.g")
        return ModelSpec(kind="sds", g=g, k=k)

    body = _object(raw["pf"], "model.pf")
    a = matrix_from_wire(_require(body, "a", "model.pf"), "model.pf.a")
    b = matrix_from_wire(_require(body, "b", "model.pf"), "model.pf.b")
    for name, M in (("a", a), ("b", b)):
        if len(M) != 2:
            raise ValidationError("Pseudo-fermion operators must be 2x2", field=f"model.pf.{name}")
    omega = _number(body.get("omega", 1.0), "model.pf.omega")
    shift = _number(body.get("shift", 0.0), "model.pf.shift")
    return ModelSpec(kind="pf", a=a, b=b, omega=omega, shift=shift)


def _parse_grid_field(value, where):
    if isinstance(value, str):
        return parse_grid(value, where)
    if isinstance(value, dict):
        start = _number(_require(value, "start", where), f"{where}.start")
        stop = _number(_require(value, "stop", where), f"{where}.stop")
        steps = _require(value, "steps", where)
        if isinstance(steps, bool) or not isinstance(steps, int):
            raise ValidationError("steps must be an integer", field=f"{where}.steps")
        return grid_from_range(start, stop, steps, where)
    if isinstance(value, list):
        return check_grid(value, where)
    raise ValidationError("Grid must be a list, 'start:stop:steps' or {start, stop, steps}", field=where)


def _parse_generator(value, where):
    try:
        return GeneratorKind(value)
    except ValueError:
        choices = ", ".join(g.value for g in GeneratorKind)
        raise ValidationError(f"Unknown generator '{value}' (choose from {choices})", field=where)


def _parse_scenarios(raw, dim):
    if not isinstance(raw, list):
        raise ValidationError("Expected a list of scenarios", field="scenarios")
    scenarios = []
    seen = set()
    for i, entry in enumerate(raw):
        where = f"scenarios[{i}]"
        entry = _object(entry, where)
        name = entry.get("name", f"s{i}")
        if not isinstance(name, str) or not SCENARIO_NAME.match(name):
            raise ValidationError("Scenario names use letters, digits, '_' and '-'", field=f"{where}.name")
        if name in seen:
            raise ValidationError(f"Duplicate scenario name '{name}'", field=f"{where}.name")
        seen.add(name)
        initial = _require(entry, "initial", where)
        final = _require(entry, "final", where)
        parse_state(initial, f"{where}.initial", dim)
        parse_state(final, f"{where}.final", dim)
        scenarios.append(ScenarioSpec(
            name=name,
            initial=initial,
            final=final,
            generator=_parse_generator(entry.get("generator", "H"), f"{where}.generator"),
            grid=_parse_grid_field(_require(entry, "grid", where), f"{where}.grid"),
        ))
    return tuple(scenarios)


def parse_laws(values, where="laws"):
    if not isinstance(values, list) or not values:
        raise ValidationError("Expected a non-empty list of laws", field=where)
    laws = []
    for i, value in enumerate(values):
        try:
            law = ProbabilityLaw(value)
        except ValueError:
            raise ValidationError(f"Unknown law '{value}'", field=f"{where}[{i}]")
        if law in laws:
            raise ValidationError(f"Duplicate law '{value}'", field=f"{where}[{i}]")
        laws.append(law)
    return tuple(laws)


def _parse_outputs(raw):
    raw = _object(raw, "outputs")
    directory = raw.get("dir")
    if directory is not None and not isinstance(directory, str):
        raise ValidationError("Output dir must be a string", field="outputs.dir")
    formats = raw.get("formats", list(OUTPUT_FORMATS))
    if not isinstance(formats, list) or any(f not in OUTPUT_FORMATS for f in formats):
        raise ValidationError(f"Formats must be a subset of {list(OUTPUT_FORMATS)}", field="outputs.formats")
    return OutputSpec(dir=directory, formats=tuple(f for f in OUTPUT_FORMATS if f in formats))


def _parse_tolerances(raw):
    raw = _object(raw, "tolerances")
    # Validated here so a bad key is a spec error
    DEFAULT_TOLERANCES.with_overrides(raw)
    return tuple(sorted(raw.items()))


def _parse_thermal(raw):
    raw = _object(raw, "thermal")
    betas = _require(raw, "beta", "thermal")
    if not isinstance(betas, list) or not betas:
        raise ValidationError("beta must be a non-empty list", field="thermal.beta")
    betas = tuple(_number(b, f"thermal.beta[{i}]") for i, b in enumerate(betas))
    if any(b <= 0 for b in betas):
        raise ValidationError("beta values must be positive", field="thermal.beta")
    times = raw.get("times", [0.3, 1.7])
    if not isinstance(times, list) or not times:
        raise ValidationError("times must be a non-empty list", field="thermal.times")
    times = tuple(_number(t, f"thermal.times[{i}]") for i, t in enumerate(times))
    return ThermalSpec(betas=betas, times=times)


def parse_spec(text, path="<spec>"):
    """
    Parse and validate an experiment spec document

    Args:
        text: JSON text
        path: Source name used in error reports

    Returns:
        ExperimentSpec

    Raises:
        ParseError: malformed JSON
        ValidationError: a field is missing or invalid
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Invalid JSON: {e.msg}", path=path, line=e.lineno)
    raw = _object(raw, "")

    unknown = sorted(set(raw) - TOP_LEVEL_KEYS)
    if unknown:
        raise ValidationError(f"Unknown field '{unknown[0]}'", field=unknown[0])

    model = _parse_model(_require(raw, "model", ""))
    default_policy = "sds" if model.kind == "sds" else "unit"
    try:
        normalization = NormalizationPolicy(raw.get("normalization", default_policy))
    except ValueError:
        raise ValidationError("normalization must be 'unit' or 'sds'", field="normalization")

    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ValidationError("seed must be a non-negative integer", field="seed")
    include_hdagger = raw.get("include_hdagger", False)
    if not isinstance(include_hdagger, bool):
        raise ValidationError("include_hdagger must be true or false", field="include_hdagger")

    return ExperimentSpec(
        model=model,
        normalization=normalization,
        scenarios=_parse_scenarios(raw.get("scenarios", []), model.dim),
        laws=parse_laws(raw["laws"]) if "laws" in raw else ALL_LAWS,
        outputs=_parse_outputs(raw.get("outputs", {})),
        tolerances=_parse_tolerances(raw.get("tolerances", {})),
        thermal=_parse_thermal(raw["thermal"]) if "thermal" in raw else None,
        seed=seed,
        include_hdagger=include_hdagger,
    )


def _model_to_dict(model):
    if model.kind == "matrix":
        return {"matrix": matrix_to_wire(model.matrix)}
    if model.kind == "sds":
        return {"sds": {"g": model.g, "k": model.k}}
    return {"pf": {"a": matrix_to_wire(model.a), "b": matrix_to_wire(model.b),
                   "omega": model.omega, "shift": model.shift}}


def spec_to_dict(spec):
    data = {
        "model": _model_to_dict(spec.model),
        "normalization": spec.normalization.value,
        "scenarios": [
            {"name": s.name, "initial": s.initial, "final": s.final,
             "generator": s.generator.value, "grid": list(s.grid)}
            for s in spec.scenarios
        ],
        "laws": [law.value for law in spec.laws],
        "outputs": {"formats": list(spec.outputs.formats)},
        "tolerances": dict(spec.tolerances),
        "seed": spec.seed,
        "include_hdagger": spec.include_hdagger,
    }
    if spec.outputs.dir is not None:
        data["outputs"]["dir"] = spec.outputs.dir
    if spec.thermal is not None:
        data["thermal"] = {"beta": list(spec.thermal.betas), "times": list(spec.thermal.times)}
    return data


def serialize_spec(spec):
    """Canonical JSON text; parse_spec(serialize_spec(s)) == s"""
    return json.dumps(spec_to_dict(spec), indent=2, sort_keys=True)


def with_overrides(spec, grid=None, laws=None, generator=None, tolerances=None, seed=None, out_dir=None):
    """
    Apply command-line overrides to a parsed spec

    Args:
        grid: 'start:stop:steps' applied to every scenario
        laws: Tuple of ProbabilityLaw
        generator: GeneratorKind applied to every scenario
        tolerances: Mapping merged over the spec's table
        seed: Random seed for audit vectors
        out_dir: Output directory
    """
    scenarios = spec.scenarios
    if grid is not None:
        expanded = parse_grid(grid, "--grid")
        scenarios = tuple(replace(s, grid=expanded) for s in scenarios)
    if generator is not None:
        scenarios = tuple(replace(s, generator=generator) for s in scenarios)

    merged = dict(spec.tolerances)
    if tolerances:
        DEFAULT_TOLERANCES.with_overrides(tolerances)
        merged.update(tolerances)

    return replace(
        spec,
        scenarios=scenarios,
        laws=laws if laws else spec.laws,
        tolerances=tuple(sorted(merged.items())),
        seed=spec.seed if seed is None else seed,
        outputs=replace(spec.outputs, dir=out_dir) if out_dir else spec.outputs,
    )


def sds_spec(g, k, policy=NormalizationPolicy.SDS):
    """Spec for the SDS model shorthand with no scenarios"""
    model = _parse_model({"sds": {"g": float(g), "k": float(k)}})
    return ExperimentSpec(model=model, normalization=policy)

