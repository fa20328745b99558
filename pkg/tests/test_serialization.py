from __future__ import annotations

import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import datum_of
from mpqsa.cartan import generic_matrix
from mpqsa.deform_data import CocycleData, TwistData, admissible_cocycle, symbolic_antisymmetric
from mpqsa.realization import InvariantViolation, build_realization
from mpqsa.serialization import ParseError, dump, dumps, io_roundtrip, load, loads, matrix_from_doc


def _pair(label: str = "A3"):
    d = datum_of(label)
    P = generic_matrix(d)
    return P, build_realization(P, d, "split_minimal", 2 * d.rank)


def test_round_trips(datum):
    P, R = _pair_for(datum)
    for value in (datum, P, R, TwistData.make(symbolic_antisymmetric(R.rank, "f")), admissible_cocycle(R)):
        assert loads(dumps(value)) == value
    back_P, back_R = loads(dumps((P, R)), "realization")
    assert back_P == P and back_R == R


def _pair_for(datum):
    P = generic_matrix(datum)
    return P, build_realization(P, datum, "split_minimal", 2 * datum.rank)


def test_dumps_is_stable_text():
    P, R = _pair()
    text = dumps((P, R))
    assert text.endswith("\n")
    assert text == dumps(loads(text))
    assert list(json.loads(text)) == sorted(json.loads(text))


def test_file_and_stream(tmp_path):
    P, R = _pair()
    path = tmp_path / "r.json"
    dump((P, R), path)
    assert io_roundtrip(path, "realization") == (P, R)
    buf = io.StringIO()
    dump(P, buf)
    buf.seek(0)
    assert load(buf, "matrix") == P


def test_ragged_matrix_location():
    with pytest.raises(ParseError) as err:
        loads(json.dumps({"kind": "matrix", "matrix": [["1", "2"], ["3"]]}))
    assert err.value.location == "$.matrix[1]"


def test_syntax_error_location():
    with pytest.raises(ParseError) as err:
        loads('{"kind": "matrix",\n  "matrix": [[1, }')
    assert err.value.location.startswith("2:")


@pytest.mark.parametrize("doc,where", [
    ({"kind": "nope"}, "$.kind"),
    ({"matrix": [["1"]]}, "$"),
    ({"kind": "twist", "phi": [["0", "1"], ["0", "0"]]}, "$.phi"),
    ({"kind": "matrix", "matrix": [["1.5"]]}, "$.matrix[0][0]"),
])
def test_malformed_documents(doc, where):
    with pytest.raises(ParseError) as err:
        loads(json.dumps(doc))
    assert err.value.location == where


def test_wrong_kind():
    P, _ = _pair()
    with pytest.raises(ParseError):
        loads(dumps(P), "realization")


def test_inconsistent_pairing_rejected():
    P, R = _pair("A2")
    doc = json.loads(dumps((P, R)))
    doc["matrix"][0][1] = "7"
    with pytest.raises(InvariantViolation):
        loads(json.dumps(doc))


def test_missing_file():
    with pytest.raises(ParseError):
        load("/nonexistent/doc.json")


@given(st.lists(st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=7), min_size=3, max_size=3), min_size=3, max_size=3))
def test_rational_entries_round_trip(rows):
    from mpqsa.serialization import matrix_to_doc

    assert matrix_from_doc(matrix_to_doc(rows)) == [[r for r in row] for row in rows]


def test_twist_and_cocycle_kinds():
    _, R = _pair("A2")
    assert isinstance(loads(dumps(admissible_cocycle(R)), "cocycle"), CocycleData)
    tw = TwistData.make(symbolic_antisymmetric(4, "f"))
    assert loads(dumps(tw), "twist") == tw
