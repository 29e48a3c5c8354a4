import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulter_sums.cyclotomic import CycInt, cyc_int, gauss_sum_prime
from coulter_sums.errors import EnumerationCeiling, ZeroB, ZeroCoefficient
from coulter_sums.field import build_field
from coulter_sums.oracles import (
    SumSpec,
    count_n,
    count_N,
    enumerate_D,
    enumerate_M,
    evaluate_oracle,
    oracle_A,
    oracle_B,
    oracle_B_naive,
    oracle_gauss_q,
    oracle_weil,
    oracle_weil_row,
)


def naive_weil(ctx, alpha, a, b):
    counts = [0] * ctx.p
    for x in ctx.elements():
        counts[(a * x * x.frobenius(alpha) + b * x).trace()] += 1
    return CycInt.from_counts(counts, ctx.p)


def test_small_hand_values():
    ctx = build_field(3, 1)
    one = ctx.one
    assert oracle_weil(ctx, 1, one, ctx.zero).coeffs == (1, 2)
    assert oracle_A(ctx, 1, 1) == cyc_int(3, 3)
    assert oracle_B(ctx, 1, 0, 0, one) == cyc_int(6, 3)
    assert oracle_B(ctx, 1, 1, 1, one) == cyc_int(3, 3)
    assert [count_n(ctx, 1, a) for a in range(3)] == [1, 2, 0]
    assert count_N(ctx, 1, 1, 1, one) == 1
    assert [int(x) for x in enumerate_D(ctx, 1, 1)] == [1, 2]
    assert [int(x) for x in enumerate_M(ctx, 1, 1, 1, one)] == [1]


def test_gauss_sum_of_gf27():
    G = oracle_gauss_q(build_field(3, 3))
    assert (G * G).as_rational_integer() == -27
    assert (G * G.conj()).as_rational_integer() == 27


def test_gauss_sum_of_prime_field_matches():
    for p in (3, 5, 7):
        assert oracle_gauss_q(build_field(p, 1)) == gauss_sum_prime(p)


@given(st.sampled_from([(3, 2), (5, 2), (3, 3)]), st.data())
def test_weil_matches_naive(pe, data):
    ctx = build_field(*pe)
    alpha = data.draw(st.integers(1, ctx.e))
    a = ctx.elem(data.draw(st.integers(1, ctx.q - 1)))
    b = ctx.elem(data.draw(st.integers(0, ctx.q - 1)))
    assert oracle_weil(ctx, alpha, a, b) == naive_weil(ctx, alpha, a, b)


def test_weil_row_matches_single():
    ctx = build_field(5, 2)
    a = ctx.theta
    row = oracle_weil_row(ctx, 1, a)
    assert row == [oracle_weil(ctx, 1, a, ctx.elem(b)) for b in range(ctx.q)]


@pytest.mark.parametrize("p,e", [(3, 2), (3, 3), (5, 2)])
def test_histogram_B_matches_triple_loop(p, e):
    ctx = build_field(p, e)
    for alpha in range(1, e + 1):
        for benc in (1, ctx.q - 1):
            b = ctx.elem(benc)
            for a in range(p):
                for c in range(p):
                    assert oracle_B(ctx, alpha, a, c, b) == oracle_B_naive(ctx, alpha, a, c, b)


def test_spec_validation():
    with pytest.raises(ZeroB):
        SumSpec(3, 1, 1, "B", a_fp=0, c_fp=0, b_fq=0)
    with pytest.raises(ZeroCoefficient):
        SumSpec(3, 1, 1, "S0", a_fq=0)
    with pytest.raises(ValueError):
        SumSpec(3, 1, 1, "Z")
    spec = SumSpec(3, 1, 1, "NCount", a_fp=1, c_fp=1, b_fq=1)
    assert evaluate_oracle(spec) == 1


def test_enumeration_ceiling(monkeypatch):
    monkeypatch.setenv("COULTER_MAX_Q", "100")
    with pytest.raises(EnumerationCeiling):
        oracle_gauss_q(build_field(3, 5))
