import pickle

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulter_sums.errors import CtxMismatch, DegreeZero, DivisionByZero, EvenPrime, NotPrime
from coulter_sums.field import (
    build_field,
    is_irreducible,
    parse_element,
    quad_char_prime,
    smallest_irreducible,
)

FIELDS = [(3, 1), (3, 2), (3, 3), (5, 2), (7, 2), (3, 4), (5, 3), (11, 2)]


def elements(p, e):
    q = p**e
    return st.integers(0, q - 1).map(lambda n: build_field(p, e).elem(n))


field_and_elems = st.sampled_from(FIELDS).flatmap(
    lambda pe: st.tuples(st.just(pe), elements(*pe), elements(*pe), elements(*pe))
)


def test_known_moduli():
    assert build_field(3, 2).modulus == (1, 0, 1)
    assert build_field(5, 2).modulus == (2, 0, 1)
    assert build_field(3, 1).modulus == (0, 1)


def test_smallest_irreducible_is_smallest():
    for p, e in [(3, 2), (3, 3), (5, 2), (7, 2)]:
        m = smallest_irreducible(p, e)
        enc = sum(c * p**i for i, c in enumerate(m[:-1]))
        for smaller in range(enc):
            cand = [(smaller // p**i) % p for i in range(e)] + [1]
            assert not is_irreducible(cand, p)


def test_x_squared_in_gf9():
    ctx = build_field(3, 2)
    assert int(ctx.x * ctx.x) == 2


def test_bad_parameters():
    with pytest.raises(NotPrime):
        build_field(9, 1)
    with pytest.raises(EvenPrime):
        build_field(2, 3)
    with pytest.raises(DegreeZero):
        build_field(3, 0)


def test_theta_is_primitive_and_smallest():
    for p, e in FIELDS:
        ctx = build_field(p, e)
        th = ctx.theta
        seen = {int(th**k) for k in range(ctx.q - 1)}
        assert len(seen) == ctx.q - 1
        for n in range(1, int(th)):
            x = ctx.elem(n)
            assert len({int(x**k) for k in range(ctx.q - 1)}) < ctx.q - 1


@given(field_and_elems)
def test_ring_axioms(data):
    _, x, y, z = data
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x - x == x.ctx.zero


@given(field_and_elems)
def test_inverse_and_fermat(data):
    _, x, _, _ = data
    ctx = x.ctx
    assert x ** ctx.q == x
    if x:
        assert x * x.inverse() == ctx.one
        assert x ** -1 == x.inverse()
    else:
        with pytest.raises(DivisionByZero):
            x.inverse()


@given(field_and_elems)
def test_frobenius_and_trace(data):
    (p, e), x, y, _ = data
    assert x.frobenius(1) == x**p
    assert x.frobenius(e) == x
    assert (x + y).trace() == (x.trace() + y.trace()) % p
    # trace is the sum of conjugates, landing in F_p
    tot = x.ctx.zero
    for k in range(e):
        tot = tot + x.frobenius(k)
    assert tot == x.ctx.embed_prime(x.trace())


@given(field_and_elems)
def test_quad_char_multiplicative(data):
    _, x, y, _ = data
    assert (x * y).quad_char() == x.quad_char() * y.quad_char()


def test_quad_char_prime_matches_euler():
    for p in (3, 5, 7, 11, 13):
        for y in range(p):
            expected = 0 if y == 0 else (1 if pow(y, (p - 1) // 2, p) == 1 else -1)
            assert quad_char_prime(y, p) == expected


def test_vectorized_kernels_match_scalar():
    for p, e in FIELDS:
        ctx = build_field(p, e)
        xs = ctx.all_coeffs
        sq = ctx.vmul(xs, xs)
        fr = ctx.vfrob(xs, 1)
        tr = ctx.vtrace(xs)
        for n in range(0, ctx.q, max(1, ctx.q // 40)):
            x = ctx.elem(n)
            assert tuple(sq[n]) == (x * x).coeffs
            assert tuple(fr[n]) == x.frobenius(1).coeffs
            assert tr[n] == x.trace()
        assert np.array_equal(ctx.encode_array(xs), np.arange(ctx.q))


def test_ctx_mismatch():
    a = build_field(3, 2).one
    b = build_field(5, 2).one
    with pytest.raises(CtxMismatch):
        a + b


def test_parse_element_and_pickle():
    ctx = build_field(3, 3)
    assert parse_element("theta^0", ctx) == ctx.one
    assert parse_element("theta", ctx) == ctx.theta
    assert parse_element("1,2", ctx) == ctx.elem([1, 2, 0])
    assert pickle.loads(pickle.dumps(ctx)) is ctx
    with pytest.raises(ValueError):
        parse_element("phi^2", ctx)
