import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from nhqdyn.errors import ParseError, ValidationError
from nhqdyn.output import (
    error_from_exception, read_trace_csv, success_response, to_json, write_json, write_trace_csv
)


def test_error_envelope():
    envelope = error_from_exception(ValidationError("bad k", field="model.sds.k"))
    assert envelope == {
        "success": False,
        "error": {"type": "validation_error", "message": "bad k", "field": "model.sds.k"},
    }


def test_parse_error_envelope():
    envelope = error_from_exception(ParseError("Invalid JSON", path="exp.json", line=4))
    assert envelope["error"]["line"] == 4
    assert envelope["error"]["path"] == "exp.json"


def test_success_envelope():
    assert success_response({"files": []}) == {"success": True, "data": {"files": []}}


def test_json_handles_numpy():
    data = json.loads(to_json({"x": np.float64(0.5), "n": np.int64(3), "v": np.arange(2.0)}))
    assert data == {"x": 0.5, "n": 3, "v": [0.0, 1.0]}


def test_json_rejects_nan():
    with pytest.raises(ValueError):
        to_json({"x": float("nan")})


def test_write_json_is_sorted(tmp_path):
    path = write_json(tmp_path / "nested" / "report.json", {"b": 1, "a": 2})
    text = path.read_text(encoding="utf-8")
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')


def test_trace_csv_round_trip(tmp_path):
    times = np.linspace(0.0, 1.0, 7)
    columns = {"standard": np.sin(times) ** 2, "psi": np.full(7, 1.0 / 3.0)}
    path = write_trace_csv(tmp_path / "transit_a.csv", times, columns)

    assert path.read_text(encoding="utf-8").splitlines()[0] == "t,standard,psi"
    table = read_trace_csv(path)
    assert list(table) == ["t", "standard", "psi"]
    assert_array_equal(table["t"], times)
    assert_array_equal(table["standard"], columns["standard"])
    assert_array_equal(table["psi"], columns["psi"])
