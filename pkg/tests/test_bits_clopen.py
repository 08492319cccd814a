"""Bit strings, points, and the clopen-set algebra.

The clopen oracle is brute enumeration: a set is pinned down by which
length-L strings it meets/covers, so every algebraic op is checked against
plain Python set operations on string extensions.
"""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from divmart.bits import BitString, Point
from divmart.clopen import ClopenSet
from divmart.dyadic import Dyadic
from divmart.errors import ParseError

# ---------------------------------------------------------------------------
# oracle helpers


def extensions(c: ClopenSet, depth: int) -> set:
    """All length-`depth` strings whose cylinder lies inside the set."""
    out = set()
    for v in range(1 << depth):
        s = format(v, f"0{depth}b") if depth else ""
        if any(str(t) == s[: len(t)] for t in c.cylinders):
            out.add(s)
    return out


bitstrings = st.text(alphabet="01", max_size=7)
cylinder_lists = st.lists(bitstrings, max_size=6)


# ---------------------------------------------------------------------------
# BitString / Point


def test_bitstring_basics():
    s = BitString("0110")
    assert len(s) == 4
    assert [s.bit(i) for i in range(4)] == [0, 1, 1, 0]
    assert list(s) == [0, 1, 1, 0]
    assert str(s) == "0110"
    assert s.child(1) == BitString("01101")
    assert s.parent() == BitString("011")
    assert s.prefix(2) == BitString("01")
    assert s.concat(BitString("10")) == BitString("011010")
    assert BitString("01").is_prefix_of(s)
    assert not BitString("10").is_prefix_of(s)
    assert BitString("") < BitString("0") < BitString("1") < BitString("00")


def test_bitstring_errors():
    with pytest.raises(ParseError):
        BitString("0a1")
    with pytest.raises(ValueError):
        BitString("").parent()
    with pytest.raises(IndexError):
        BitString("01").bit(2)


def test_point_parsing():
    p = Point.parse("01(10)")
    assert str(p) == "01(10)"
    assert [p.bit_at(i) for i in range(8)] == [0, 1, 1, 0, 1, 0, 1, 0]
    assert p.prefix(5) == BitString("01101")
    assert p.starts_with(BitString("011"))
    for bad in ["", "01", "()", "01()", "2(0)", "(01"]:
        with pytest.raises(ParseError):
            Point.parse(bad)


def test_point_semantic_equality():
    # 0(10) and 01(01) denote the same sequence 0,1,0,1,...
    a = Point.parse("0(10)")
    b = Point.parse("01(01)")
    assert a != b  # structural
    assert a.same_sequence(b)
    assert a.first_difference(b) is None
    c = Point.parse("0(01)")
    assert not a.same_sequence(c)
    assert a.first_difference(c) == 1


# ---------------------------------------------------------------------------
# ClopenSet golden values


def test_normalization_merges_siblings():
    c = ClopenSet.from_strings(["00", "01"])
    assert c.cylinders == (BitString("0"),)
    full = ClopenSet.from_strings(["0", "10", "11"])
    assert full.is_full


def test_normalization_drops_covered():
    c = ClopenSet.from_strings(["0", "01", "0110"])
    assert c.cylinders == (BitString("0"),)


def test_complement_golden():
    c = ClopenSet.from_strings(["00"])
    assert c.complement() == ClopenSet.from_strings(["01", "1"])
    assert ClopenSet.full().complement().is_empty
    assert ClopenSet.empty().complement().is_full


def test_measure_golden():
    assert ClopenSet.from_strings(["0", "10"]).measure == Dyadic(3, 2)
    assert ClopenSet.full().measure == 1
    assert ClopenSet.empty().measure == 0
    assert ClopenSet.from_strings(["0110"]).measure == Dyadic(1, 4)


def test_even_zeros_stage3_oracle():
    # All length-6 cylinders with bits 0, 2, 4 equal to zero; by direct
    # enumeration exactly 8 of the 64 length-6 strings qualify.
    qualifying = [
        format(v, "06b")
        for v in range(64)
        if format(v, "06b")[0] == "0"
        and format(v, "06b")[2] == "0"
        and format(v, "06b")[4] == "0"
    ]
    assert len(qualifying) == 8
    c = ClopenSet.from_strings(qualifying)
    assert c.measure == Dyadic(1, 3)


def test_measure_in_and_density():
    c = ClopenSet.from_strings(["00", "1"])
    assert c.measure_in(BitString("0")) == Dyadic(1, 2)
    assert c.measure_in(BitString("00")) == Dyadic(1, 2)
    assert c.measure_in(BitString("01")) == 0
    assert c.measure_in(BitString("1")) == Dyadic(1, 1)


def test_point_queries():
    c = ClopenSet.from_strings(["00", "1"])
    assert c.contains_point(Point.parse("(0)"))
    assert c.contains_point(Point.parse("(1)"))
    assert not c.contains_point(Point.parse("01(0)"))
    assert c.cylinder_containing(Point.parse("(0)")) == BitString("00")
    assert c.cylinder_containing(Point.parse("01(0)")) is None


def test_subset_and_minus():
    a = ClopenSet.from_strings(["00"])
    b = ClopenSet.from_strings(["0"])
    assert a.is_subset_of(b)
    assert not b.is_subset_of(a)
    assert b.minus(a) == ClopenSet.from_strings(["01"])


# ---------------------------------------------------------------------------
# ClopenSet properties against the enumeration oracle


@given(cylinder_lists)
def test_membership_matches_input(strings):
    c = ClopenSet.from_strings(strings)
    got = extensions(c, 7)
    want = set()
    for v in range(1 << 7):
        s = format(v, "07b")
        if any(s.startswith(t) for t in strings):
            want.add(s)
    assert got == want


@given(cylinder_lists, cylinder_lists)
def test_union_intersect_oracle(xs, ys):
    a, b = ClopenSet.from_strings(xs), ClopenSet.from_strings(ys)
    ea, eb = extensions(a, 7), extensions(b, 7)
    assert extensions(a.union(b), 7) == ea | eb
    assert extensions(a.intersect(b), 7) == ea & eb
    assert extensions(a.minus(b), 7) == ea - eb


@given(cylinder_lists)
def test_complement_oracle(xs):
    a = ClopenSet.from_strings(xs)
    alls = {format(v, "07b") for v in range(1 << 7)}
    assert extensions(a.complement(), 7) == alls - extensions(a, 7)
    assert a.complement().complement() == a


@given(cylinder_lists)
def test_measure_is_density_at_depth(xs):
    a = ClopenSet.from_strings(xs)
    assert a.measure == Dyadic(len(extensions(a, 7)), 7)


@given(cylinder_lists, bitstrings)
def test_meets_covers_oracle(xs, t):
    a = ClopenSet.from_strings(xs)
    ts = BitString(t)
    ext_t = {format(v, "07b") for v in range(1 << 7) if format(v, "07b").startswith(t)}
    ea = extensions(a, 7)
    assert a.meets(ts) == bool(ext_t & ea)
    assert a.covers(ts) == (ext_t <= ea)
    assert a.measure_in(ts) == Dyadic(len(ext_t & ea), 7)
