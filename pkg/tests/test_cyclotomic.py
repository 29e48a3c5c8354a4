import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulter_sums.cyclotomic import COEFF_BOUND, CycInt, cyc_int, gauss_sum_prime, zeta_pow
from coulter_sums.errors import CycOverflow, PrimeMismatch
from coulter_sums.field import quad_char_prime

PRIMES = (3, 5, 7, 11, 13)


def cycs(p):
    return st.lists(st.integers(-50, 50), min_size=p - 1, max_size=p - 1).map(
        lambda c: CycInt(p, tuple(c))
    )


triples = st.sampled_from(PRIMES).flatmap(lambda p: st.tuples(cycs(p), cycs(p), cycs(p)))


@given(triples)
def test_ring_laws(t):
    x, y, z = t
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x - x == cyc_int(0, x.p)


@given(triples)
def test_conj_is_a_ring_map(t):
    x, y, _ = t
    assert (x * y).conj() == x.conj() * y.conj()
    assert x.conj().conj() == x


def test_from_counts_folds_last_slot():
    # 1 + zeta + zeta^2 = 0 in Z[zeta_3]
    assert CycInt.from_counts([1, 1, 1], 3) == cyc_int(0, 3)
    assert zeta_pow(3, 3) == cyc_int(1, 3)
    assert zeta_pow(2, 3) == CycInt(3, (-1, -1))


def test_gauss_sum_squares():
    for p in PRIMES:
        G = gauss_sum_prime(p)
        assert (G * G).as_rational_integer() == quad_char_prime(-1, p) * p
    assert gauss_sum_prime(3).coeffs == (1, 2)


def test_overflow_and_mismatch():
    big = cyc_int(COEFF_BOUND - 1, 3)
    with pytest.raises(CycOverflow):
        big * 2
    with pytest.raises(PrimeMismatch):
        cyc_int(1, 3) + cyc_int(1, 5)


def test_rationality():
    assert cyc_int(7, 5).as_rational_integer() == 7
    assert zeta_pow(1, 5).as_rational_integer() is None
