"""Martingale tables: layout, slow-path recomputation, and the document
format (canonical JSON, lossless round-trips, strict parsing)."""

import pytest

from divmart.bits import BitString
from divmart.dyadic import Dyadic
from divmart.errors import ParseError
from divmart.table import (
    DOCUMENT_KIND,
    FORMAT_VERSION,
    MartingaleTable,
    dumps_document,
    loads_document,
)


def small_table() -> MartingaleTable:
    # Leaves 0, 1/2, 1/2, 1 at depth 2; interior values are the exact means.
    leaves = [Dyadic.zero(), Dyadic(1, 1), Dyadic(1, 1), Dyadic.one()]
    return MartingaleTable(
        2,
        [Dyadic(1, 1), Dyadic(1, 2), Dyadic(3, 2)] + leaves,
    )


def test_breadth_first_layout():
    t = small_table()
    assert t.value(BitString("")) == Dyadic(1, 1)
    assert t.value(BitString("0")) == Dyadic(1, 2)
    assert t.value(BitString("1")) == Dyadic(3, 2)
    assert t.value(BitString("01")) == Dyadic(1, 1)
    assert [str(s) for s, _ in t.nodes()] == ["", "0", "1", "00", "01", "10", "11"]
    assert [str(s) for s, _ in t.interior_nodes()] == ["", "0", "1"]
    assert t.leaf_values() == [Dyadic.zero(), Dyadic(1, 1), Dyadic(1, 1), Dyadic.one()]


def test_leaf_average_matches_interior_values():
    t = small_table()
    for s, v in t.interior_nodes():
        assert t.leaf_average_below(s) == v


def test_construction_validation():
    with pytest.raises(ValueError):
        MartingaleTable(-1, [])
    with pytest.raises(ValueError):
        MartingaleTable(1, [Dyadic.zero()])
    t = small_table()
    with pytest.raises(KeyError):
        t.value(BitString("000"))


def test_from_function_layout():
    t = MartingaleTable.from_function(1, lambda s: Dyadic(s.v, 2))
    assert t.values == [Dyadic.zero(), Dyadic.zero(), Dyadic(1, 2)]


def test_document_round_trip():
    t = small_table()
    doc = t.to_document(spec_echo={"kind": "sigma3"}, truncation=4)
    assert doc["kind"] == DOCUMENT_KIND and doc["version"] == FORMAT_VERSION
    back, spec, k = MartingaleTable.from_document(loads_document(dumps_document(doc)))
    assert back.values == t.values and back.depth == t.depth
    assert spec == {"kind": "sigma3"} and k == 4


def test_canonical_serialization_is_stable():
    doc_a = {"b": 1, "a": [2, 3]}
    doc_b = {"a": [2, 3], "b": 1}
    assert dumps_document(doc_a) == dumps_document(doc_b)
    assert dumps_document(doc_a).endswith("\n")
    assert " " not in dumps_document(doc_a)


def test_document_parsing_rejections():
    t = small_table()
    good = t.to_document()
    with pytest.raises(ParseError):
        loads_document("[1, 2]")
    with pytest.raises(ParseError):
        loads_document("{nope")
    with pytest.raises(ParseError):
        MartingaleTable.from_document({**good, "kind": "other"})
    with pytest.raises(ParseError):
        MartingaleTable.from_document({**good, "version": 99})
    with pytest.raises(ParseError):
        MartingaleTable.from_document({**good, "depth": "2"})
    with pytest.raises(ParseError):
        MartingaleTable.from_document({**good, "values": [["1", 2, 3]] * 7})
