"""Arithmetic in F_p and GF(p^e).

Elements of GF(p^e) are coefficient vectors over F_p in the polynomial basis
1, x, ..., x^(e-1) modulo a fixed monic irreducible polynomial.  The integer
encoding of an element is ``sum(c_i * p**i)``, so the constant term is the
least significant digit.

Besides the scalar element type, :class:`FieldCtx` carries a few numpy
kernels (``vmul``, ``vfrob``, ``vtrace``) that act on a whole ``(n, e)``
array of coefficient rows at once; the enumeration oracles are built on them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np
import sympy

from .errors import CtxMismatch, DegreeZero, DivisionByZero, EnumerationCeiling, EvenPrime, NotPrime

PRIME_CEILING = 1 << 20
DEFAULT_MAX_Q = 200_000


def enumeration_ceiling() -> int:
    """Largest q the oracles will enumerate; ``COULTER_MAX_Q`` overrides it."""
    raw = os.environ.get("COULTER_MAX_Q")
    if raw:
        return int(raw)
    return DEFAULT_MAX_Q


def check_prime(p: int) -> int:
    if not isinstance(p, int) or p < 2 or not sympy.isprime(p):
        raise NotPrime(f"{p!r} is not prime")
    if p == 2:
        raise EvenPrime("p must be an odd prime")
    if p > PRIME_CEILING:
        raise NotPrime(f"p={p} exceeds the supported ceiling {PRIME_CEILING}")
    return p


def quad_char_prime(y: int, p: int) -> int:
    """Legendre symbol (y|p), with 0 mapped to 0."""
    y %= p
    if y == 0:
        return 0
    return 1 if pow(y, (p - 1) // 2, p) == 1 else -1


# -- polynomials over F_p as coefficient lists, constant term first ----------

def _trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mod(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    f = _trim([c % p for c in f])
    g = _trim([c % p for c in g])
    inv = pow(g[-1], -1, p)
    while len(f) >= len(g):
        coef = f[-1] * inv % p
        shift = len(f) - len(g)
        for i, gi in enumerate(g):
            f[shift + i] = (f[shift + i] - coef * gi) % p
        _trim(f)
    return f


def _poly_mulmod(f: Sequence[int], g: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                out[i + j] += fi * gj
    return _poly_mod(out, m, p)


def _poly_powmod(f: Sequence[int], n: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(f, m, p)
    while n:
        if n & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        n >>= 1
    return result


def _poly_gcd(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    f = _trim([c % p for c in f])
    g = _trim([c % p for c in g])
    while g:
        f, g = g, _poly_mod(f, g, p)
    return f


def is_irreducible(m: Sequence[int], p: int) -> bool:
    """Distinct-degree test: gcd(x^(p^k) - x, m) = 1 for every k <= deg(m)/2."""
    e = len(m) - 1
    if e <= 1:
        return e == 1
    xp = [0, 1]
    for _ in range(e // 2):
        xp = _poly_powmod(xp, p, m, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(_poly_gcd(m, diff, p)) != 1:
            return False
    return True


def _digits(n: int, p: int, e: int) -> tuple[int, ...]:
    out = []
    for _ in range(e):
        n, r = divmod(n, p)
        out.append(r)
    return tuple(out)


def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Monic irreducible of degree e whose lower coefficients have the smallest encoding."""
    for enc in range(p**e):
        m = _digits(enc, p, e) + (1,)
        if is_irreducible(m, p):
            return m
    raise AssertionError("no irreducible polynomial found")  # unreachable


# -- the field -----------------------------------------------------------------

class FieldCtx:
    """Immutable description of GF(p^e).

    Build through :func:`build_field`, which caches contexts so that one
    ``(p, e)`` pair always maps to the same object.
    """

    def __init__(self, p: int, e: int, modulus: tuple[int, ...]):
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = modulus
        # reductions of x^k mod m for k < 2e-1, as coefficient tuples
        red: list[tuple[int, ...]] = []
        for k in range(2 * e - 1):
            if k < e:
                red.append(tuple(int(i == k) for i in range(e)))
            else:
                red.append(tuple(self._times_x(red[-1])))
        self._red = tuple(red)
        self._red_np = np.array(red, dtype=np.int64)

    def _times_x(self, v: Sequence[int]) -> list[int]:
        p, e = self.p, self.e
        top = v[-1]
        out = [0] + list(v[:-1])
        if top:
            for i in range(e):
                out[i] = (out[i] - top * self.modulus[i]) % p
        return out

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, e={self.e})"

    def __reduce__(self):
        return (build_field, (self.p, self.e))

    @property
    def key(self) -> tuple[int, int]:
        return (self.p, self.e)

    # -- elements -------------------------------------------------------------

    def elem(self, value: int | Iterable[int] | "FqElem") -> "FqElem":
        """Element from an integer encoding or a coefficient sequence."""
        if isinstance(value, FqElem):
            self._check(value)
            return value
        if isinstance(value, (int, np.integer)):
            value = int(value)
            if not 0 <= value < self.q:
                raise ValueError(f"encoding {value} out of range for q={self.q}")
            return FqElem(_digits(value, self.p, self.e), self)
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.e:
            raise ValueError(f"expected at most {self.e} coefficients")
        coeffs += [0] * (self.e - len(coeffs))
        return FqElem(tuple(coeffs), self)

    def embed_prime(self, y: int) -> "FqElem":
        """The residue y mod p as a constant element."""
        return FqElem((y % self.p,) + (0,) * (self.e - 1), self)

    @cached_property
    def zero(self) -> "FqElem":
        return self.embed_prime(0)

    @cached_property
    def one(self) -> "FqElem":
        return self.embed_prime(1)

    @cached_property
    def x(self) -> "FqElem":
        return FqElem(tuple(self._times_x(self._red[0])), self)

    def elements(self) -> Iterable["FqElem"]:
        for n in range(self.q):
            yield self.elem(n)

    def _check(self, a: "FqElem") -> None:
        if a.ctx is not self:
            raise CtxMismatch(f"element of {a.ctx!r} used with {self!r}")

    # -- scalar kernels -------------------------------------------------------

    def _reduce(self, prod: Sequence[int]) -> tuple[int, ...]:
        p, e = self.p, self.e
        out = [0] * e
        for k, c in enumerate(prod):
            if c:
                row = self._red[k] if k < len(self._red) else self._xpow(k)
                for i in range(e):
                    out[i] += c * row[i]
        return tuple(v % p for v in out)

    def _xpow(self, k: int) -> tuple[int, ...]:
        v = list(self._red[-1])
        for _ in range(k - len(self._red) + 1):
            v = self._times_x(v)
        return tuple(v)

    def _mul(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        e = self.e
        prod = [0] * (2 * e - 1)
        for i in range(e):
            ai = a[i]
            if ai:
                for j in range(e):
                    prod[i + j] += ai * b[j]
        return self._reduce(prod)

    @cached_property
    def frobenius_matrices(self) -> tuple[np.ndarray, ...]:
        """``F[k]`` maps coefficient vectors of a to those of a^(p^k), k < e."""
        p, e = self.p, self.e
        xp = self._pow_coeffs(self.x.coeffs, p)
        cols = [self._reduce([1])]
        for _ in range(1, e):
            cols.append(self._mul(cols[-1], xp))
        f1 = np.array(cols, dtype=np.int64).T
        mats = [np.eye(e, dtype=np.int64)]
        for _ in range(1, e):
            mats.append((f1 @ mats[-1]) % p)
        for m in mats:
            m.setflags(write=False)
        return tuple(mats)

    @cached_property
    def _frob_lists(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        return tuple(tuple(tuple(int(v) for v in row) for row in m) for m in self.frobenius_matrices)

    @cached_property
    def trace_vector(self) -> tuple[int, ...]:
        """Tr(x^i) for i < e; Tr(a) is the dot product with a's coefficients."""
        total = sum(self.frobenius_matrices) % self.p
        # the image of Tr lies in F_p, so only row 0 can be nonzero
        assert not total[1:].any()
        return tuple(int(v) for v in total[0])

    @cached_property
    def trace_form(self) -> np.ndarray:
        """Matrix T with Tr(u*v) = u^T T v (mod p)."""
        p, e = self.p, self.e
        tv = self.trace_vector
        t = np.zeros((e, e), dtype=np.int64)
        for i in range(e):
            for j in range(e):
                xij = self._red[i + j]
                t[i, j] = sum(c * s for c, s in zip(xij, tv)) % p
        t.setflags(write=False)
        return t

    def _pow_coeffs(self, a: Sequence[int], n: int) -> tuple[int, ...]:
        result = self._reduce([1])
        base = tuple(a)
        while n:
            if n & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            n >>= 1
        return result

    @cached_property
    def theta(self) -> "FqElem":
        """Primitive element with the smallest integer encoding."""
        order = self.q - 1
        cofactors = [order // r for r in sympy.factorint(order)]
        one = self.one.coeffs
        for n in range(1, self.q):
            c = _digits(n, self.p, self.e)
            if all(self._pow_coeffs(c, k) != one for k in cofactors):
                return FqElem(c, self)
        raise AssertionError("no primitive element")  # unreachable

    # -- vectorized kernels over (n, e) coefficient arrays ----------------------

    def check_enumerable(self) -> None:
        ceiling = enumeration_ceiling()
        if self.q > ceiling:
            raise EnumerationCeiling(f"q={self.q} exceeds the enumeration ceiling {ceiling}")

    @cached_property
    def all_coeffs(self) -> np.ndarray:
        """Row n holds the coefficients of the element with encoding n."""
        self.check_enumerable()
        return self.coeff_array(np.arange(self.q, dtype=np.int64))

    def coeff_array(self, encodings: np.ndarray) -> np.ndarray:
        enc = np.asarray(encodings, dtype=np.int64)
        out = np.empty(enc.shape + (self.e,), dtype=np.int64)
        for i in range(self.e):
            out[..., i] = enc % self.p
            enc = enc // self.p
        return out

    @cached_property
    def _place_values(self) -> np.ndarray:
        return self.p ** np.arange(self.e, dtype=np.int64)

    def encode_array(self, coeffs: np.ndarray) -> np.ndarray:
        return coeffs @ self._place_values

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        e = self.e
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        shape = np.broadcast_shapes(a.shape, b.shape)
        prod = np.zeros(shape[:-1] + (2 * e - 1,), dtype=np.int64)
        for i in range(e):
            prod[..., i : i + e] += a[..., i : i + 1] * b
        return (prod @ self._red_np) % self.p

    def vfrob(self, a: np.ndarray, k: int) -> np.ndarray:
        return (np.asarray(a) @ self.frobenius_matrices[k % self.e].T) % self.p

    def vtrace(self, a: np.ndarray) -> np.ndarray:
        return (np.asarray(a) @ np.array(self.trace_vector, dtype=np.int64)) % self.p

    @cached_property
    def square_mask(self) -> np.ndarray:
        """Boolean array over encodings: True where the element is a nonzero square."""
        sq = self.encode_array(self.vmul(self.all_coeffs, self.all_coeffs))
        mask = np.zeros(self.q, dtype=bool)
        mask[sq] = True
        mask[0] = False
        return mask

    @cached_property
    def quad_char_table(self) -> np.ndarray:
        """eta over all encodings, values in {-1, 0, 1}."""
        table = np.where(self.square_mask, 1, -1).astype(np.int64)
        table[0] = 0
        return table


@lru_cache(maxsize=None)
def build_field(p: int, e: int) -> FieldCtx:
    check_prime(p)
    if not isinstance(e, int) or e < 1:
        raise DegreeZero(f"extension degree must be a positive integer, got {e!r}")
    return FieldCtx(p, e, smallest_irreducible(p, e))


@dataclass(frozen=True, slots=True)
class FqElem:
    coeffs: tuple[int, ...]
    ctx: FieldCtx

    def __int__(self) -> int:
        p = self.ctx.p
        return sum(c * p**i for i, c in enumerate(self.coeffs))

    def __index__(self) -> int:
        return int(self)

    def __hash__(self) -> int:
        return hash((self.ctx.key, self.coeffs))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FqElem):
            return self.ctx is other.ctx and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self == self.ctx.embed_prime(other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"FqElem({list(self.coeffs)}, p={self.ctx.p}, e={self.ctx.e})"

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def _coerce(self, other) -> "FqElem":
        if isinstance(other, FqElem):
            if other.ctx is not self.ctx:
                raise CtxMismatch("operands belong to different fields")
            return other
        if isinstance(other, int):
            return self.ctx.embed_prime(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ctx.p
        return FqElem(tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)), self.ctx)

    __radd__ = __add__

    def __neg__(self) -> "FqElem":
        p = self.ctx.p
        return FqElem(tuple(-a % p for a in self.coeffs), self.ctx)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            p = self.ctx.p
            return FqElem(tuple(a * other % p for a in self.coeffs), self.ctx)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FqElem(self.ctx._mul(self.coeffs, other.coeffs), self.ctx)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "FqElem":
        if n < 0:
            return self.inverse() ** (-n)
        return FqElem(self.ctx._pow_coeffs(self.coeffs, n), self.ctx)

    def inverse(self) -> "FqElem":
        if not self:
            raise DivisionByZero("zero has no inverse")
        return self ** (self.ctx.q - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def frobenius(self, k: int = 1) -> "FqElem":
        """a^(p^k)."""
        k %= self.ctx.e
        if k == 0:
            return self
        mat = self.ctx._frob_lists[k]
        p = self.ctx.p
        c = self.coeffs
        return FqElem(tuple(sum(r * v for r, v in zip(row, c)) % p for row in mat), self.ctx)

    def trace(self) -> int:
        return sum(a * t for a, t in zip(self.coeffs, self.ctx.trace_vector)) % self.ctx.p

    def quad_char(self) -> int:
        if not self:
            return 0
        return 1 if self ** ((self.ctx.q - 1) // 2) == self.ctx.one else -1


# Functional spellings of the element operations.

def _same(a: FqElem, b: FqElem) -> None:
    if a.ctx is not b.ctx:
        raise CtxMismatch("operands belong to different fields")


def fq_add(a: FqElem, b: FqElem) -> FqElem:
    _same(a, b)
    return a + b


def fq_mul(a: FqElem, b: FqElem) -> FqElem:
    _same(a, b)
    return a * b


def fq_neg(a: FqElem) -> FqElem:
    return -a


def fq_inv(a: FqElem) -> FqElem:
    return a.inverse()


def fq_pow(a: FqElem, n: int) -> FqElem:
    return a**n


def frobenius(a: FqElem, k: int) -> FqElem:
    if k < 0:
        raise ValueError("Frobenius exponent must be non-negative")
    return a.frobenius(k)


def trace(a: FqElem) -> int:
    return a.trace()


def quad_char(a: FqElem) -> int:
    return a.quad_char()


def embed_prime(y: int, ctx: FieldCtx) -> FqElem:
    return ctx.embed_prime(y)


def parse_element(spec: str, ctx: FieldCtx) -> FqElem:
    """Parse ``theta^k`` or a comma-separated coefficient vector (constant first)."""
    text = spec.strip().replace(" ", "")
    if text.startswith("theta"):
        rest = text[len("theta"):]
        k = int(rest[1:]) if rest.startswith("^") else (1 if rest == "" else None)
        if k is None:
            raise ValueError(f"cannot parse element {spec!r}")
        return ctx.theta**k
    return ctx.elem(int(c) for c in text.split(","))
