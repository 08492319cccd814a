"""Target-set descriptions: closed-form stage geometry against materialized
stages and brute enumeration."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divmart.bits import EMPTY, BitString, Point
from divmart.clopen import ClopenSet
from divmart.dyadic import Dyadic
from divmart.errors import HorizonExhausted, ParseError
from divmart.sets import (
    EvenZeros,
    ExplicitGDelta,
    Membership,
    SigmaThreeSet,
    Singleton,
    component_from_spec,
    density_ratio,
    even_zeros,
    parse_rate,
    singleton,
)

K = even_zeros()


# ---------------------------------------------------------------------------
# even-zeros: brute-force oracles


def brute_stage(n: int) -> ClopenSet:
    """stage(n) as all length-2n strings with zeros at even positions."""
    if n == 0:
        return ClopenSet.full()
    good = []
    for v in range(1 << (2 * n)):
        s = format(v, f"0{2 * n}b")
        if all(s[i] == "0" for i in range(0, 2 * n, 2)):
            good.append(s)
    return ClopenSet.from_strings(good)


@pytest.mark.parametrize("n", range(7))
def test_stage_matches_brute(n):
    assert K.stage(n) == brute_stage(n)


@pytest.mark.parametrize("n", range(7))
def test_stage_measure(n):
    assert K.stage(n).measure == Dyadic.pow2(-n)
    assert K.measure_stage_in(n, EMPTY) == Dyadic.pow2(-n)
    assert K.stage_count(n) == len(K.stage(n).cylinders)


def all_bitstrings(max_len: int):
    for l in range(max_len + 1):
        for v in range(1 << l):
            yield BitString.raw(l, v)


def test_measure_stage_in_closed_form():
    for n in range(5):
        st_n = brute_stage(n)
        for t in all_bitstrings(6):
            assert K.measure_stage_in(n, t) == st_n.measure_in(t), (n, t)


def test_density_example():
    # relative measure of stage(n) in N_{0^{2j}} is 2^(-(n-j)) for j <= n
    beta = Point.parse("(0)")
    for n in range(1, 7):
        for j in range(n + 1):
            assert density_ratio(
                _stage_view(n), beta, 2 * j
            ) == Dyadic.pow2(-(n - j))


def _stage_view(n):
    from divmart.sets import StageView

    return StageView(K, n)


def test_stage_cylinder_containing():
    beta = Point.parse("(0)")
    for n in range(1, 8):
        w = K.stage_cylinder_containing(n, beta)
        assert w == BitString.zeros(2 * n - 1)
        assert K.stage(min(n, 6)) if n > 6 else K.stage(n).covers(w)
    assert K.stage_cylinder_containing(3, Point.parse("001(0)")) is None
    assert K.stage_cylinder_containing(1, Point.parse("001(0)")) == BitString("0")


def test_exit_and_refutation():
    assert K.exit_stage(Point.parse("(0)")) is None
    assert K.exit_stage(Point.parse("(01)")) is None  # even positions all 0
    assert K.exit_stage(Point.parse("(1)")) == 1
    assert K.exit_stage(Point.parse("001(0)")) == 2
    assert K.stage_refutation_depth(2, Point.parse("001(0)")) == 3
    with pytest.raises(ValueError):
        K.stage_refutation_depth(1, Point.parse("001(0)"))


def test_membership_tristate():
    assert K.membership(Point.parse("(0)"), 0) is Membership.IN
    assert K.membership(Point.parse("(1)"), 3) is Membership.OUT
    deep = Point.parse("0" * 40 + "1(0)")  # exits at stage 21
    assert K.membership(deep, 3) is Membership.UNDECIDED
    assert K.membership(deep, 25) is Membership.OUT


def test_meets_target():
    assert K.meets_target(BitString("0"))
    assert K.meets_target(BitString("0101"))
    assert not K.meets_target(BitString("1"))
    assert not K.meets_target(BitString("001"))


def test_stage_sample_matches_stage():
    for n in range(1, 7):
        sample = K.stage_sample(n, 1 << (n - 1))
        assert tuple(sample) == K.stage(n).cylinders


def test_stage_cap_is_honest():
    with pytest.raises(HorizonExhausted):
        K.stage(19)
    # the closed forms keep working far beyond the materialization cap
    assert K.measure_stage_in(64, EMPTY) == Dyadic.pow2(-64)
    assert K.stage_count(64) == 1 << 63


# ---------------------------------------------------------------------------
# singleton


def test_singleton_geometry():
    p = Point.parse("01(10)")
    s = singleton(p)
    for n in range(8):
        assert s.stage(n) == ClopenSet.cylinder(p.prefix(n))
        assert s.measure_stage_in(n, EMPTY) == Dyadic.pow2(-n)
    assert s.exit_stage(p) is None
    assert s.exit_stage(Point.parse("0(0)")) == 2
    assert s.stage_cylinder_containing(4, p) == p.prefix(4)
    assert s.stage_cylinder_containing(4, Point.parse("(0)")) is None
    assert s.meets_target(p.prefix(9))
    assert not s.meets_target(BitString("00"))
    # semantically equal but structurally different points still resolve
    q = Point.parse("011(01)")
    assert p.same_sequence(q)
    assert s.exit_stage(q) is None


def test_singleton_measure_stage_in_cases():
    s = Singleton(Point.parse("(1)"))
    assert s.measure_stage_in(3, BitString("11")) == Dyadic.pow2(-3)
    assert s.measure_stage_in(3, BitString("1111")) == Dyadic.pow2(-4)
    assert s.measure_stage_in(3, BitString("10")) == 0


# ---------------------------------------------------------------------------
# explicit descriptions


def _explicit(stages, rate="2^-n"):
    return ExplicitGDelta(
        [ClopenSet.from_strings(s) for s in stages], parse_rate(rate), rate
    )


def test_explicit_basics():
    g = _explicit([[""], ["0"], ["00"]])
    assert g.stage(0).is_full
    assert g.stage(1) == ClopenSet.from_strings(["0"])
    assert g.stage(5) == ClopenSet.from_strings(["00"])  # last repeats
    assert g.exit_stage(Point.parse("(0)")) is None
    assert g.exit_stage(Point.parse("01(0)")) == 2
    assert g.exit_stage(Point.parse("(1)")) == 1
    assert g.frozen_from == 2
    assert g.meets_target(BitString("000"))
    assert not g.meets_target(BitString("01"))


def test_explicit_validation():
    with pytest.raises(ParseError):
        _explicit([[""], ["0"], ["1"]])  # not decreasing
    with pytest.raises(ParseError):
        _explicit([[""], ["0", "10"]])  # measure 3/4 > rate 1/2
    with pytest.raises(ParseError):
        _explicit([])


def test_explicit_inserts_full_stage():
    g = _explicit([["0"]])
    assert g.stage(0).is_full
    assert g.stage(1) == ClopenSet.from_strings(["0"])


def test_rate_parsing():
    assert parse_rate("2^-n")(3) == Dyadic.pow2(-3)
    assert parse_rate("2^-(n+2)")(3) == Dyadic.pow2(-5)
    assert parse_rate("2^-(n-1)")(3) == Dyadic.pow2(-2)
    for bad in ["3^-n", "2^-2n", "1/2", "2^-(n*2)", ""]:
        with pytest.raises(ParseError):
            parse_rate(bad)


# ---------------------------------------------------------------------------
# sigma3 documents


def test_spec_round_trip():
    doc = {
        "kind": "sigma3",
        "components": [
            {"kind": "even-zeros"},
            {"kind": "singleton", "point": "01(10)"},
            {"kind": "explicit", "stages": [[""], ["0"]], "rate": "2^-n"},
        ],
    }
    b = SigmaThreeSet.from_spec(doc)
    assert [c.kind for c in b.components] == ["even-zeros", "singleton", "explicit"]
    assert b.to_spec_dict() == doc


def test_spec_errors():
    with pytest.raises(ParseError):
        SigmaThreeSet.from_spec({"kind": "union"})
    with pytest.raises(ParseError):
        SigmaThreeSet.from_spec({"kind": "sigma3", "components": "nope"})
    with pytest.raises(ParseError):
        component_from_spec({"kind": "mystery"})
    with pytest.raises(ParseError):
        component_from_spec({"kind": "singleton"})


def test_sigma3_membership():
    b = SigmaThreeSet([EvenZeros(), Singleton(Point.parse("(1)"))])
    assert b.membership(Point.parse("(0)"), 5) is Membership.IN
    assert b.membership(Point.parse("(1)"), 5) is Membership.IN
    assert b.membership(Point.parse("(10)"), 5) is Membership.OUT
    deep = Point.parse("0" * 40 + "1(0)")
    assert b.membership(deep, 3) is Membership.UNDECIDED


# ---------------------------------------------------------------------------
# properties


@given(st.integers(min_value=0, max_value=6), st.integers(min_value=0, max_value=64))
@settings(max_examples=60)
def test_stage_measure_in_additivity(n, v):
    # measure in a cylinder equals the sum over its two children — the
    # closed form must be a premeasure.
    t = BitString.raw(6, v & 63).prefix(min(6, max(0, v % 7)))
    m = K.measure_stage_in(n, t)
    assert m == K.measure_stage_in(n, t.child(0)) + K.measure_stage_in(n, t.child(1))


@given(st.integers(min_value=1, max_value=6))
def test_stages_nested(n):
    assert K.stage(n).is_subset_of(K.stage(n - 1))
