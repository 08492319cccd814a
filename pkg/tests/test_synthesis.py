"""Stagewise martingale synthesis, the union combinator, and embeddings.

The stage chain for the canonical targets is frozen: the budget recurrence
forces presentation-stage indices m_0 = 0, m_n = m_{n-1} + n + 3, giving
0, 4, 9, 15, 22, ... and region measures 2^(-m_n).  These values double as
an independent oracle for the divergence-measure bound and the witness
geometry, so any change to the budget arithmetic shows up here exactly.
"""

import pytest
from hypothesis import given, settings, strategies as st

from divmart.analysis import first_identity_violation
from divmart.bits import BitString, Point, EMPTY
from divmart.clopen import ClopenSet
from divmart.dyadic import Dyadic
from divmart.errors import HorizonExhausted
from divmart.fine import StepFunction
from divmart.sets import EvenZeros, ExplicitGDelta, Singleton, parse_rate
from divmart.synthesis import (
    SCALE,
    ConstantPart,
    EmbeddedMartingale,
    StageRegion,
    ClopenRegion,
    embed_continuous,
    gdelta_martingale,
    sigma3_pipeline,
    union_combine,
)

M_CHAIN = [0, 4, 9, 15, 22, 30, 39, 49, 60, 72, 85, 99, 114, 130, 147]


@pytest.fixture(scope="module")
def even():
    return gdelta_martingale(EvenZeros())


@pytest.fixture(scope="module")
def single():
    return gdelta_martingale(Singleton(Point.parse("(1)")))


# ---------------------------------------------------------------------------
# the stage chain


def test_stage_index_recurrence(even):
    assert [even.stage(n).stage_index for n in range(15)] == M_CHAIN
    for n in range(1, 15):
        assert M_CHAIN[n] == M_CHAIN[n - 1] + n + 3


def test_region_measures_follow_the_chain(even):
    for n in range(6):
        assert even.stage(n).gstar.measure == Dyadic.pow2(-M_CHAIN[n])


def test_singleton_has_the_same_chain(single):
    assert [single.stage(n).stage_index for n in range(6)] == M_CHAIN[:6]
    # Witnesses of the singleton are its own prefixes, one per stage.
    got = [str(single.stage(n).witnesses.sample(1)[0]) for n in range(5)]
    assert got == ["1" * m for m in M_CHAIN[:5]]


def test_stage_zero_is_the_full_space(even):
    cert = even.stage(0)
    assert cert.gstar.covers(EMPTY)
    assert [str(w) for w in cert.witnesses.sample(4)] == [""]
    assert cert.sign == 1 and cert.signed_combination == (1,)


def test_witness_geometry(even):
    # Stage n witnesses: canonical cylinders of stage(m_n); the trailing odd
    # (unconstrained) bit merges away, leaving length 2·m_n - 1.
    cert = even.stage(1)
    assert cert.witnesses.count() == 8
    sample = cert.witnesses.sample(3)
    assert [str(w) for w in sample] == ["0000000", "0000010", "0001000"]
    assert even.stage(2).witnesses.count() == 256
    for n in (1, 2):
        for w in even.stage(n).witnesses.sample(4):
            assert len(w) == 2 * M_CHAIN[n] - 1
            assert even.target.meets_target(w)


def test_witness_enumeration_cap(even):
    # Stage 3 has 2^14 witnesses — refuse to materialize them.
    with pytest.raises(HorizonExhausted):
        even.stage(3).witnesses.all()


def test_certificate_chain_access(even):
    cert = even.stage(3)
    for j in range(4):
        assert cert.chain_region(j) is even.stage(j).gstar
    with pytest.raises(ValueError):
        cert.chain_region(7)
    assert cert.signed_combination == (1, -1, 1, -1)


def test_stage_conditions_audit_clean(even, single):
    for n in range(5):
        assert even.check_stage_conditions(n) == []
    for n in range(4):
        assert single.check_stage_conditions(n) == []


def test_witness_mean_error_is_exactly_zero(even):
    # Condition (6) holds with error 0 at canonical witnesses: each witness
    # is nested in every earlier region, so the partial mean telescopes.
    for n in range(1, 5):
        w = even.stage(n).witnesses.sample(1)[0]
        assert even.witness_mean_error(n, w) == Dyadic.zero()


def test_budget_condition_at_witnesses(even):
    # Condition (5): λ(G*_{n+1} ∩ N_w) / λ(N_w) < 2^(-n-3).
    golden = {1: Dyadic(1, 5), 2: Dyadic(1, 6), 3: Dyadic(1, 7)}
    for n, expected in golden.items():
        w = even.stage(n).witnesses.sample(1)[0]
        rel = even.relative_measure(n + 1, w)
        assert rel == expected
        assert rel < Dyadic.pow2(-n - 3)


# ---------------------------------------------------------------------------
# evaluation: exact nested intervals


def test_eval_ladder_at_root(even):
    coarse = even.eval(EMPTY, Dyadic(1, 8))
    assert coarse == (Dyadic(15, 4), Dyadic(481, 9))
    fine_iv = even.eval(EMPTY, Dyadic(1, 10))
    assert fine_iv == (Dyadic(30783, 15), Dyadic(3940225, 22))
    # Nesting and width certificates.
    assert coarse[0] <= fine_iv[0] and fine_iv[1] <= coarse[1]
    assert coarse[1] - coarse[0] == Dyadic.pow2(-9) <= Dyadic(1, 8)
    assert fine_iv[1] - fine_iv[0] == Dyadic.pow2(-22) <= Dyadic(1, 10)


def test_eval_is_exact_once_the_chain_dies(even):
    # N_1 misses every region past G*_0, so the value is exactly 1.
    assert even.eval(BitString("1"), Dyadic(1, 8)) == (Dyadic.one(), Dyadic.one())


def test_table_value_golden(even):
    assert even.table_value(3, EMPTY) == Dyadic(3940225, 22)
    # M_k(s) = partial mean of S_{k+1}.
    assert even.table_value(0, EMPTY) == Dyadic(15, 4)


def test_truncated_table_is_a_martingale(even):
    table = even.truncated_table(1, 6)
    assert first_identity_violation(table) is None
    for s, v in table.interior_nodes():
        assert v == table.leaf_average_below(s)


# ---------------------------------------------------------------------------
# explicitly-presented targets take the materialized-region path


@pytest.fixture(scope="module")
def explicit_target():
    stages = [ClopenSet.from_strings(["0" * k]) for k in range(17)]
    return ExplicitGDelta(stages, parse_rate("2^-n"), "2^-n")


def test_explicit_target_builds_clopen_regions(explicit_target):
    g = gdelta_martingale(explicit_target)
    assert isinstance(g.stage(0).gstar, StageRegion)
    for n in (1, 2, 3):
        assert isinstance(g.stage(n).gstar, ClopenRegion)
        assert g.stage(n).gstar.measure == Dyadic.pow2(-M_CHAIN[n])
    assert [[str(w) for w in g.stage(n).witnesses.all()] for n in range(4)] == [
        [""], ["0000"], ["000000000"], ["000000000000000"]
    ]
    for n in range(3):
        assert g.check_stage_conditions(n) == []


def test_explicit_target_exhausts_honestly(explicit_target):
    # The frozen presentation stops shrinking at index 16, so the stage-4
    # budget (2^-6 relative to a depth-15 witness) is unreachable.
    g = gdelta_martingale(explicit_target)
    g.stage(3)
    with pytest.raises(HorizonExhausted) as exc:
        g.stage(4)
    assert "stage budget" in str(exc.value)


# ---------------------------------------------------------------------------
# the union combinator


def test_constant_part_validation():
    with pytest.raises(ValueError):
        ConstantPart(Dyadic(3, 1))
    part = ConstantPart(Dyadic(5, 3))
    assert part.eval(EMPTY, Dyadic(1, 4)) == (Dyadic(5, 3), Dyadic(5, 3))
    assert part.table_value(7, BitString("0110")) == Dyadic(5, 3)


def test_union_of_constants_is_the_constant():
    c = Dyadic(5, 3)
    for k in (1, 2, 3, 5):
        f = union_combine([ConstantPart(c)] * k, tail_constant=c)
        for name in ["", "0", "01", "0110", "111"]:
            s = BitString(name)
            assert f.eval(s, Dyadic(1, 6)) == (c, c)
            assert f.table_value(2, s) == c


def test_empty_union_is_zero():
    f = union_combine([])
    assert f.eval(EMPTY, Dyadic(1, 4)) == (Dyadic.zero(), Dyadic.zero())
    g = union_combine([], tail_constant=Dyadic(1, 1))
    assert g.eval(EMPTY, Dyadic(1, 4)) == (Dyadic(1, 1), Dyadic(1, 1))
    with pytest.raises(ValueError):
        union_combine([], tail_constant=Dyadic(-1, 1))


def test_union_scaling_of_a_single_part(even):
    f = union_combine([even])
    # At N_1 the part is exactly 1, so the union is exactly 3/4.
    assert f.eval(BitString("1"), Dyadic(1, 8)) == (SCALE, SCALE)
    with pytest.raises(ValueError):
        f.eval(EMPTY, Dyadic.zero())


def test_union_table_is_the_scaled_sum(even, single):
    f = union_combine([even, single], tail_constant=Dyadic(1, 1))
    for name in ["", "0", "1", "010"]:
        s = BitString(name)
        want = (
            (even.table_value(2, s) * SCALE)
            + (single.table_value(2, s) * SCALE).mul_pow2(-2)
            + Dyadic(1, 1).mul_pow2(-4)
        )
        assert f.table_value(2, s) == want


def test_pipeline_wraps_components(even):
    from divmart.sets import SigmaThreeSet

    pipe = sigma3_pipeline(SigmaThreeSet([EvenZeros(), Singleton(Point.parse("(1)"))]))
    assert len(pipe.parts) == 2
    assert pipe.tail_constant is None
    table = pipe.truncated_table(1, 5)
    assert first_identity_violation(table) is None


# ---------------------------------------------------------------------------
# embedding step functions


def test_embedded_indicator_means():
    h = StepFunction(1, [Dyadic.one(), Dyadic.zero()])
    phi = embed_continuous(h)
    assert isinstance(phi, EmbeddedMartingale)
    assert phi.value(EMPTY) == Dyadic(1, 1)
    assert phi.value(BitString("0")) == Dyadic.one()
    assert phi.value(BitString("1")) == Dyadic.zero()
    # Constant below the step resolution.
    assert phi.value(BitString("0110")) == phi.value(BitString("01"))
    assert phi.eval(EMPTY, Dyadic(1, 9)) == (Dyadic(1, 1), Dyadic(1, 1))
    assert phi.table(4).values == phi.truncated_table(3, 4).values


dyadic_values = st.integers(min_value=0, max_value=64).map(lambda k: Dyadic(k, 6))


@settings(max_examples=40)
@given(
    st.integers(min_value=0, max_value=4).flatmap(
        lambda d: st.lists(dyadic_values, min_size=1 << d, max_size=1 << d)
    )
)
def test_embedded_tables_are_martingales(values):
    depth = (len(values)).bit_length() - 1
    phi = embed_continuous(StepFunction(depth, values))
    table = phi.table(depth + 1)
    assert first_identity_violation(table) is None
    # The embedding recovers the step exactly at its own resolution.
    for i, v in enumerate(values):
        leaf = BitString(format(i, f"0{depth}b") if depth else "")
        assert phi.value(leaf) == v
