"""Exact arithmetic in Z[zeta_p].

A :class:`CycInt` stores coefficients over the basis zeta^0, ..., zeta^(p-2).
zeta^(p-1) is rewritten as -(1 + zeta + ... + zeta^(p-2)), which makes the
representation unique: two values are equal iff their coefficient tuples are.

Internally most computations accumulate *exponent counts*, a length-p vector
``c`` standing for sum(c[k] * zeta^k); :meth:`CycInt.from_counts` folds the
last slot back into the basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import CycOverflow, PrimeMismatch
from .field import check_prime, quad_char_prime

COEFF_BOUND = 1 << 62


def _checked(coeffs: tuple[int, ...]) -> tuple[int, ...]:
    for c in coeffs:
        if not -COEFF_BOUND < c < COEFF_BOUND:
            raise CycOverflow(f"cyclotomic coefficient {c} exceeds the 2^62 bound")
    return coeffs


@dataclass(frozen=True, slots=True)
class CycInt:
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.p - 1:
            raise ValueError(f"expected {self.p - 1} coefficients, got {len(self.coeffs)}")
        _checked(self.coeffs)

    @classmethod
    def from_counts(cls, counts: Sequence[int], p: int) -> "CycInt":
        """Value of sum(counts[k] * zeta^k) for k < p, in canonical form."""
        if len(counts) != p:
            raise ValueError(f"expected {p} exponent counts, got {len(counts)}")
        last = int(counts[p - 1])
        return cls(p, tuple(int(counts[k]) - last for k in range(p - 1)))

    def counts(self) -> list[int]:
        """Length-p exponent vector with a zero in the zeta^(p-1) slot."""
        return list(self.coeffs) + [0]

    def _other(self, other) -> "CycInt":
        if isinstance(other, int):
            return cyc_int(other, self.p)
        if isinstance(other, CycInt):
            if other.p != self.p:
                raise PrimeMismatch(f"Z[zeta_{self.p}] vs Z[zeta_{other.p}]")
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return CycInt(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "CycInt":
        return CycInt(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.p, _checked(tuple(a * other for a in self.coeffs)))
        other = self._other(other)
        if other is NotImplemented:
            return other
        p = self.p
        acc = [0] * p
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        acc[(i + j) % p] += a * b
        return CycInt.from_counts(acc, p)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CycInt":
        if n < 0:
            raise ValueError("negative powers are not defined in Z[zeta_p]")
        result = cyc_int(1, self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def times_zeta(self, k: int) -> "CycInt":
        """Multiply by zeta^k (a cyclic shift of exponent counts)."""
        p = self.p
        k %= p
        if k == 0:
            return self
        acc = [0] * p
        for i, a in enumerate(self.coeffs):
            acc[(i + k) % p] = a
        return CycInt.from_counts(acc, p)

    def conj(self) -> "CycInt":
        p = self.p
        acc = [0] * p
        for i, a in enumerate(self.coeffs):
            acc[-i % p] = a
        return CycInt.from_counts(acc, p)

    def as_rational_integer(self) -> int | None:
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __repr__(self) -> str:
        n = self.as_rational_integer()
        if n is not None:
            return f"CycInt({n}, p={self.p})"
        return f"CycInt({list(self.coeffs)}, p={self.p})"


def cyc_zero(p: int) -> CycInt:
    return CycInt(p, (0,) * (p - 1))


def cyc_int(n: int, p: int) -> CycInt:
    return CycInt(p, (int(n),) + (0,) * (p - 2))


def cyc_add(a: CycInt, b: CycInt) -> CycInt:
    return a + b


def cyc_scale(a: CycInt, n: int) -> CycInt:
    return a * n


def cyc_mul(a: CycInt, b: CycInt) -> CycInt:
    if not isinstance(b, CycInt):
        raise TypeError("cyc_mul expects two CycInt values")
    return a * b


def zeta_pow(k: int, p: int) -> CycInt:
    counts = [0] * p
    counts[k % p] = 1
    return CycInt.from_counts(counts, p)


def conj(a: CycInt) -> CycInt:
    return a.conj()


def as_rational_integer(a: CycInt) -> int | None:
    return a.as_rational_integer()


@lru_cache(maxsize=None)
def gauss_sum_prime(p: int) -> CycInt:
    """G = sum over t in F_p* of (t|p) * zeta^t."""
    check_prime(p)
    return CycInt.from_counts([quad_char_prime(t, p) for t in range(p)], p)
