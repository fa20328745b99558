"""JSON documents for data, matrices, realizations and deformation parameters.

Every document is an object with a ``kind`` field.  Matrix entries are written
as exponent-polynomial strings (``"1/2*p1_2 - 3"``) and read back with
:meth:`ExponentPoly.parse`; the nested term encoding is accepted as well.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Any

from .cartan import CartanError, CartanSuperDatum, MultiparamMatrix
from .deform_data import CocycleData, DeformError, TwistData
from .realization import InvariantViolation, Realization, RealizationError
from .scalars import ExponentPoly

__all__ = [
    "KINDS",
    "ParseError",
    "InvariantViolation",
    "dumps",
    "loads",
    "load",
    "dump",
    "io_roundtrip",
    "matrix_to_doc",
    "matrix_from_doc",
]

KINDS = ("datum", "matrix", "realization", "twist", "cocycle")


class ParseError(ValueError):
    """Malformed input; ``location`` is a JSON path or ``line:column``."""

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location


def matrix_to_doc(rows) -> list:
    return [[str(ExponentPoly.coerce(x)) for x in row] for row in rows]


def matrix_from_doc(data, location: str = "$") -> list:
    if not isinstance(data, list) or not data:
        raise ParseError("expected a non-empty list of rows", location)
    width = None
    out = []
    for i, row in enumerate(data):
        where = f"{location}[{i}]"
        if not isinstance(row, list):
            raise ParseError("row is not a list", where)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"ragged matrix: row has {len(row)} entries, expected {width}", where)
        parsed = []
        for j, x in enumerate(row):
            try:
                parsed.append(ExponentPoly.from_json(x))
            except (ValueError, TypeError) as exc:
                raise ParseError(str(exc), f"{where}[{j}]") from exc
        out.append(parsed)
    return out


def _field(doc: dict, key: str, location: str):
    if key not in doc:
        raise ParseError(f"missing field {key!r}", location)
    return doc[key]


def _to_doc(value, kind: str | None) -> dict:
    if isinstance(value, CartanSuperDatum):
        return {"kind": "datum", "datum": value.to_json()}
    if isinstance(value, MultiparamMatrix):
        return {"kind": "matrix", "matrix": matrix_to_doc(value.rows())}
    if isinstance(value, Realization):
        return {
            "kind": "realization",
            "rank": value.rank,
            "root_matrix": matrix_to_doc(value.root_rows()),
            "coroot_plus": matrix_to_doc(value.plus_rows()),
            "coroot_minus": matrix_to_doc(value.minus_rows()),
        }
    if isinstance(value, TwistData):
        return {"kind": "twist", "phi": matrix_to_doc(value.rows())}
    if isinstance(value, CocycleData):
        return {"kind": "cocycle", "chi": matrix_to_doc(value.rows())}
    if isinstance(value, tuple) and len(value) == 2 and isinstance(value[1], Realization):
        P, R = value
        doc = _to_doc(R, None)
        doc["matrix"] = matrix_to_doc(MultiparamMatrix.from_rows(P.rows() if isinstance(P, MultiparamMatrix) else P).rows())
        return doc
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(value) -> str:
    """Stable text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_to_doc(value, None), sort_keys=True, indent=2) + "\n"


def dump(value, target: str | Path | IO[str]) -> None:
    text = dumps(value)
    if hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_text(text)


def _from_doc(doc: Any, expect: str | None):
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    kind = _field(doc, "kind", "$")
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", "$.kind")
    if expect is not None and kind != expect:
        raise ParseError(f"expected a {expect} document, got {kind}", "$.kind")
    if kind == "datum":
        body = _field(doc, "datum", "$")
        try:
            return CartanSuperDatum.from_json(body)
        except (ValueError, CartanError) as exc:
            raise ParseError(str(exc), "$.datum") from exc
    if kind == "matrix":
        rows = matrix_from_doc(_field(doc, "matrix", "$"), "$.matrix")
        try:
            return MultiparamMatrix.from_rows(rows)
        except CartanError as exc:
            raise ParseError(str(exc), "$.matrix") from exc
    if kind == "realization":
        mats = {k: matrix_from_doc(_field(doc, k, "$"), f"$.{k}") for k in ("root_matrix", "coroot_plus", "coroot_minus")}
        try:
            R = Realization.make(mats["root_matrix"], mats["coroot_plus"], mats["coroot_minus"])
        except RealizationError as exc:
            raise ParseError(str(exc), "$") from exc
        if "rank" in doc and doc["rank"] != R.rank:
            raise ParseError(f"declared rank {doc['rank']!r} but matrices have {R.rank} columns", "$.rank")
        if "matrix" in doc:
            P = MultiparamMatrix.from_rows(matrix_from_doc(doc["matrix"], "$.matrix"))
            R.validate(P)  # InvariantViolation on inconsistent pairings
            return P, R
        return R
    key = "phi" if kind == "twist" else "chi"
    rows = matrix_from_doc(_field(doc, key, "$"), f"$.{key}")
    try:
        return (TwistData if kind == "twist" else CocycleData).make(rows)
    except DeformError as exc:
        raise ParseError(str(exc), f"$.{key}") from exc


def loads(text: str, expect: str | None = None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{exc.lineno}:{exc.colno}") from exc
    return _from_doc(doc, expect)


def load(source: str | Path | IO[str], expect: str | None = None):
    if hasattr(source, "read"):
        return loads(source.read(), expect)
    try:
        text = Path(source).read_text()
    except OSError as exc:
        raise ParseError(str(exc), str(source)) from exc
    return loads(text, expect)


def io_roundtrip(source: str | Path | IO[str], expect: str | None = None):
    """Parse a document, re-serialize it and parse again; returns the value after checking stability."""
    value = load(source, expect)
    again = loads(dumps(value), expect)
    if dumps(again) != dumps(value):
        raise ParseError("document does not survive a serialize/parse cycle")
    return again
