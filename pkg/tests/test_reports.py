import csv
import io
import json

import pytest
from hypothesis import given, settings

from discourse_fca.context import FormalContext
from discourse_fca.errors import ContractViolation
from discourse_fca.reports import (
    context_from_dict,
    context_to_dict,
    csv_text,
    fmt,
    read_context,
    write_context,
)

from conftest import contexts


def test_context_container_layout(c3):
    d = context_to_dict(c3)
    assert d == {
        "format": "discourse-fca-context",
        "version": 1,
        "attributes": ["a", "b", "c"],
        "objects": ["g1", "g2", "g3"],
        "rows": ["3", "5", "7"],
    }


def test_hex_rows_are_zero_padded():
    ctx = FormalContext.from_matrix([[1] + [0] * 24, [0] * 24 + [1]])
    assert context_to_dict(ctx)["rows"] == ["0000001", "1000000"]


@settings(max_examples=100)
@given(contexts())
def test_round_trip(ctx):
    assert context_from_dict(json.loads(json.dumps(context_to_dict(ctx)))) == ctx


def test_file_round_trip(tmp_path, c3):
    path = tmp_path / "sub" / "c3.json"
    write_context(path, c3)
    assert read_context(path) == c3
    assert path.read_text().endswith("\n")


@pytest.mark.parametrize(
    "doc",
    [
        {"format": "other", "version": 1},
        {"format": "discourse-fca-context", "version": 2},
        {"format": "discourse-fca-context", "version": 1, "attributes": ["a"], "objects": ["g"], "rows": ["zz"]},
        {"format": "discourse-fca-context", "version": 1, "attributes": ["a"], "objects": ["g"], "rows": ["2"]},
    ],
)
def test_bad_container(doc):
    with pytest.raises(ContractViolation):
        context_from_dict(doc)


def test_float_format():
    assert fmt(2 / 3) == "0.666667"
    assert fmt(1.0) == "1"
    assert fmt(0.005) == "0.005"
    assert fmt(None) == ""


def test_csv_text_quotes_and_newlines():
    text = csv_text(["a", "b"], [["x, y", 1]])
    assert text == 'a,b\n"x, y",1\n'
    assert list(csv.reader(io.StringIO(text))) == [["a", "b"], ["x, y", "1"]]
