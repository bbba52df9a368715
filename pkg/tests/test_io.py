import numpy as np
import pytest
from hypothesis import given, strategies as st

from tweezer_qc import io


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_text_round_trips(x):
    assert float(io.format_value(x)) == x


def test_format_of_other_types():
    assert io.format_value(True) == "true"
    assert io.format_value(np.int64(3)) == "3"
    assert io.format_value((1, 2.5)) == "1,2.5"
    assert io.format_value("abc") == "abc"


def test_hash_is_order_independent_and_sensitive():
    a = io.parameter_hash({"x": 1.0, "y": 2})
    assert a == io.parameter_hash({"y": 2, "x": 1.0})
    assert a != io.parameter_hash({"x": 1.0000001, "y": 2})
    assert len(a) == 16


def test_csv_round_trip(tmp_path):
    rows = [(1.0, 2e-7), (1.5, 3.25)]
    path = io.write_csv(tmp_path / "sub" / "a.csv", ["t", "p"], rows, {"k": 1}, "note")
    text = path.read_text().splitlines()
    assert text[0].startswith("# tool = tweezer_qc")
    assert text[1] == f"# params_hash = {io.parameter_hash({'k': 1})}"
    meta, cols, data = io.read_csv(path)
    assert cols == ["t", "p"] and np.array_equal(data, np.array(rows))
    assert meta["params_hash"] == io.parameter_hash({"k": 1})


def test_keyvalue_round_trip(tmp_path):
    values = {"coeffs": np.array([0.1, -2e-3]), "n": 5, "flag": False, "label": "x"}
    io.write_keyvalue(tmp_path / "kv.txt", values)
    back = io.read_keyvalue(tmp_path / "kv.txt")
    assert np.array_equal(back["coeffs"], values["coeffs"])
    assert back["n"] == 5 and back["flag"] is False and back["label"] == "x"
