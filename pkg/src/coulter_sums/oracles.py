"""Brute-force evaluation of the character sums and level sets by enumeration.

Everything here walks the whole field, so results are ground truth for the
closed forms.  Enumeration is vectorized with numpy over the ``(q, e)``
coefficient array of all elements.  Sums over F_p are accumulated as
exponent counts and folded into a :class:`CycInt` at the end, so no
floating point is involved anywhere.

The histogram kernels accept an encoding range ``[start, stop)``; partial
histograms over disjoint ranges add up to the full one, which is how a sweep
can split a large field across workers.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .cyclotomic import CycInt
from .errors import ZeroB, ZeroCoefficient
from .field import FieldCtx, FqElem, build_field

KINDS = ("S", "S0", "A", "B", "nCount", "NCount", "Dset", "Mset", "GaussQ", "GaussP")


@dataclass(frozen=True)
class SumSpec:
    p: int
    e: int
    alpha: int
    kind: str
    a_fq: Optional[int] = None  # integer encodings of field elements
    b_fq: Optional[int] = None
    a_fp: Optional[int] = None
    c_fp: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sum kind {self.kind!r}")
        need_b = self.kind in ("B", "NCount", "Mset")
        if need_b and not self.b_fq:
            raise ZeroB(f"kind {self.kind} needs b != 0")
        if self.kind in ("S", "S0") and not self.a_fq:
            raise ZeroCoefficient(f"kind {self.kind} needs a != 0")
        if self.kind == "S" and self.b_fq is None:
            raise ValueError("kind S needs b")
        if self.kind in ("A", "B", "nCount", "NCount", "Dset", "Mset") and self.a_fp is None:
            raise ValueError(f"kind {self.kind} needs a residue a")
        if self.kind in ("B", "NCount", "Mset") and self.c_fp is None:
            raise ValueError(f"kind {self.kind} needs a residue c")

    @property
    def ctx(self) -> FieldCtx:
        return build_field(self.p, self.e)

    def sort_key(self) -> tuple:
        return (
            self.p,
            self.e,
            self.alpha,
            self.kind,
            -1 if self.a_fq is None else self.a_fq,
            -1 if self.a_fp is None else self.a_fp,
            -1 if self.c_fp is None else self.c_fp,
            -1 if self.b_fq is None else self.b_fq,
        )

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class OracleValue:
    cyc: CycInt
    as_int: Optional[int]

    @classmethod
    def of(cls, cyc: CycInt) -> "OracleValue":
        return cls(cyc, cyc.as_rational_integer())


def _cyc(counts, p: int) -> CycInt:
    return CycInt.from_counts([int(c) for c in counts], p)


def _full_range(ctx: FieldCtx, start: int, stop: Optional[int]) -> tuple[int, int]:
    ctx.check_enumerable()
    stop = ctx.q if stop is None else stop
    if not 0 <= start <= stop <= ctx.q:
        raise ValueError(f"bad encoding range [{start}, {stop})")
    return start, stop


# -- cached per-(field, alpha) tables --------------------------------------------

@lru_cache(maxsize=64)
def _power_table(p: int, e: int, alpha: int) -> np.ndarray:
    """Coefficients of x^(p^alpha + 1) for every x, computed as x * frob^alpha(x)."""
    ctx = build_field(p, e)
    xs = ctx.all_coeffs
    out = ctx.vmul(xs, ctx.vfrob(xs, alpha))
    out.setflags(write=False)
    return out


def power_table(ctx: FieldCtx, alpha: int) -> np.ndarray:
    ctx.check_enumerable()
    return _power_table(ctx.p, ctx.e, alpha)


@lru_cache(maxsize=64)
def _power_trace(p: int, e: int, alpha: int) -> np.ndarray:
    ctx = build_field(p, e)
    out = ctx.vtrace(_power_table(p, e, alpha))
    out.setflags(write=False)
    return out


def power_trace(ctx: FieldCtx, alpha: int) -> np.ndarray:
    """Tr(x^(p^alpha + 1)) for every encoding x."""
    ctx.check_enumerable()
    return _power_trace(ctx.p, ctx.e, alpha)


@lru_cache(maxsize=16)
def _element_trace(p: int, e: int) -> np.ndarray:
    ctx = build_field(p, e)
    out = ctx.vtrace(ctx.all_coeffs)
    out.setflags(write=False)
    return out


def linear_trace(ctx: FieldCtx, b: FqElem) -> np.ndarray:
    """Tr(b x) for every encoding x."""
    ctx.check_enumerable()
    tb = ctx.trace_form @ np.array(b.coeffs, dtype=np.int64)
    return (ctx.all_coeffs @ tb) % ctx.p


def trace_histogram(ctx: FieldCtx, alpha: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """h[t] = #{x in [start, stop) : Tr(x^(p^alpha+1)) = t}."""
    start, stop = _full_range(ctx, start, stop)
    return np.bincount(power_trace(ctx, alpha)[start:stop], minlength=ctx.p)


def joint_histogram(
    ctx: FieldCtx, alpha: int, b: FqElem, start: int = 0, stop: Optional[int] = None
) -> np.ndarray:
    """H[s, t] = #{x in [start, stop) : Tr(x^(p^alpha+1)) = s, Tr(b x) = t}."""
    start, stop = _full_range(ctx, start, stop)
    p = ctx.p
    s = power_trace(ctx, alpha)[start:stop]
    t = linear_trace(ctx, b)[start:stop]
    return np.bincount(s * p + t, minlength=p * p).reshape(p, p)


# -- sums ------------------------------------------------------------------------

def _weil_counts(ctx: FieldCtx, alpha: int, a: FqElem, bs: np.ndarray) -> np.ndarray:
    """Exponent counts of S(a, b) for each row of ``bs`` (coefficient rows)."""
    p = ctx.p
    tf = ctx.trace_form
    u = (power_table(ctx, alpha) @ (tf @ np.array(a.coeffs, dtype=np.int64))) % p
    xs_t = ctx.all_coeffs.T
    out = np.empty((len(bs), p), dtype=np.int64)
    chunk = max(1, 2_000_000 // ctx.q)
    for lo in range(0, len(bs), chunk):
        lin = ((bs[lo : lo + chunk] @ tf) @ xs_t) % p
        ex = (lin + u) % p
        rows = ex + p * np.arange(ex.shape[0])[:, None]
        out[lo : lo + chunk] = np.bincount(rows.ravel(), minlength=p * ex.shape[0]).reshape(-1, p)
    return out


def oracle_weil(ctx: FieldCtx, alpha: int, a: FqElem, b: FqElem) -> CycInt:
    """S(a, b) = sum over x of zeta^Tr(a x^(p^alpha+1) + b x)."""
    if not a:
        raise ZeroCoefficient("S(a, b) needs a != 0")
    counts = _weil_counts(ctx, alpha, a, np.array([b.coeffs], dtype=np.int64))[0]
    return _cyc(counts, ctx.p)


def oracle_weil_row(ctx: FieldCtx, alpha: int, a: FqElem, b_encodings=None) -> list[CycInt]:
    """S(a, b) for many b at once (all of F_q by default), in the given order."""
    if not a:
        raise ZeroCoefficient("S(a, b) needs a != 0")
    ctx.check_enumerable()
    if b_encodings is None:
        bs = ctx.all_coeffs
    else:
        bs = ctx.coeff_array(np.asarray(list(b_encodings), dtype=np.int64))
    counts = _weil_counts(ctx, alpha, a, bs)
    return [_cyc(row, ctx.p) for row in counts]


def _char_sum_A(hist: np.ndarray, a: int, p: int) -> np.ndarray:
    y = np.arange(1, p)[:, None]
    t = np.arange(p)[None, :]
    ex = (y * (t - a)) % p
    return np.bincount(ex.ravel(), weights=np.broadcast_to(hist, ex.shape).ravel(), minlength=p).astype(np.int64)


def oracle_A(ctx: FieldCtx, alpha: int, a_fp: int) -> CycInt:
    """A(a) = sum_{y != 0} zeta^(-a y) sum_x zeta^(y Tr(x^(p^alpha+1)))."""
    hist = trace_histogram(ctx, alpha)
    return _cyc(_char_sum_A(hist, a_fp % ctx.p, ctx.p), ctx.p)


def oracle_A_from_histogram(hist: np.ndarray, a_fp: int, p: int) -> CycInt:
    return _cyc(_char_sum_A(np.asarray(hist), a_fp % p, p), p)


def _char_sum_B_all(hist: np.ndarray, p: int) -> np.ndarray:
    """Exponent counts of B(a, c) for every (a, c); shape (p, p, p)."""
    ys = np.arange(1, p)
    s = np.arange(p)
    # W[y, z, k] = sum_{s,t} H[s,t] [y s + z t = k]
    ex = (ys[:, None, None, None] * s[None, None, :, None] + ys[None, :, None, None] * s[None, None, None, :]) % p
    n = p - 1
    flat = ex.reshape(n * n, p * p) + p * np.arange(n * n)[:, None]
    w = np.bincount(
        flat.ravel(), weights=np.broadcast_to(hist.ravel(), flat.shape).ravel(), minlength=n * n * p
    ).reshape(n, n, p)
    # B(a, c)[k] = sum_{y,z} W[y, z, (k + a y + c z) mod p]
    shift = (s[:, None, None, None] * ys[None, None, :, None] + s[None, :, None, None] * ys[None, None, None, :]) % p
    k = np.arange(p)
    idx = (k[None, None, None, None, :] + shift[..., None]) % p
    yy = np.arange(n)[None, None, :, None, None]
    zz = np.arange(n)[None, None, None, :, None]
    gathered = w[yy, zz, idx]
    return np.rint(gathered.sum(axis=(2, 3))).astype(np.int64)


def oracle_B_table(ctx: FieldCtx, alpha: int, b: FqElem) -> dict[tuple[int, int], CycInt]:
    """B(a, c) for every (a, c) in F_p^2 from one joint histogram."""
    if not b:
        raise ZeroB("B(a, c) needs b != 0")
    p = ctx.p
    counts = _char_sum_B_all(joint_histogram(ctx, alpha, b), p)
    return {(a, c): _cyc(counts[a, c], p) for a in range(p) for c in range(p)}


def oracle_B_from_histogram(hist: np.ndarray, a_fp: int, c_fp: int, p: int) -> CycInt:
    counts = _char_sum_B_all(np.asarray(hist), p)
    return _cyc(counts[a_fp % p, c_fp % p], p)


def oracle_B(ctx: FieldCtx, alpha: int, a_fp: int, c_fp: int, b: FqElem) -> CycInt:
    """B(a, c) = sum_{y,z != 0} zeta^(-a y - c z) sum_x zeta^Tr(y x^(p^alpha+1) + z b x)."""
    if not b:
        raise ZeroB("B(a, c) needs b != 0")
    return oracle_B_from_histogram(joint_histogram(ctx, alpha, b), a_fp, c_fp, ctx.p)


def oracle_B_naive(ctx: FieldCtx, alpha: int, a_fp: int, c_fp: int, b: FqElem) -> CycInt:
    """Triple loop straight from the definition, element by element.

    Independent of the histogram path and of the numpy kernels; only usable
    on tiny fields.
    """
    ctx.check_enumerable()
    p = ctx.p
    counts = [0] * p
    xs = list(ctx.elements())
    for y in range(1, p):
        for z in range(1, p):
            for x in xs:
                arg = ctx.embed_prime(y) * x ** (p**alpha + 1) + ctx.embed_prime(z) * b * x
                counts[(arg.trace() - a_fp * y - c_fp * z) % p] += 1
    return CycInt.from_counts(counts, p)


def oracle_gauss_q(ctx: FieldCtx) -> CycInt:
    """G(eta, chi) = sum over x != 0 of eta(x) zeta^Tr(x)."""
    ctx.check_enumerable()
    tr = _element_trace(ctx.p, ctx.e)
    counts = np.bincount(tr, weights=ctx.quad_char_table, minlength=ctx.p)
    return _cyc(np.rint(counts).astype(np.int64), ctx.p)


def oracle_quadratic_sum(ctx: FieldCtx, a2: FqElem, a1: FqElem, a0: FqElem) -> CycInt:
    """sum over x of zeta^Tr(a2 x^2 + a1 x + a0)."""
    if not a2:
        raise ZeroCoefficient("the leading coefficient must be nonzero")
    ctx.check_enumerable()
    xs = ctx.all_coeffs
    tf = ctx.trace_form
    sq = ctx.vmul(xs, xs)
    ex = (sq @ (tf @ np.array(a2.coeffs)) + xs @ (tf @ np.array(a1.coeffs)) + a0.trace()) % ctx.p
    return _cyc(np.bincount(ex, minlength=ctx.p), ctx.p)


# -- level sets ----------------------------------------------------------------------

def enumerate_D(ctx: FieldCtx, alpha: int, a_fp: int) -> list[FqElem]:
    """{x : Tr(x^(p^alpha+1)) = a}, ordered by encoding."""
    idx = np.flatnonzero(power_trace(ctx, alpha) == a_fp % ctx.p)
    return [ctx.elem(int(n)) for n in idx]


def count_n(ctx: FieldCtx, alpha: int, a_fp: int) -> int:
    """n(a) = |D(a) u {0}| for a = 0, |D(a)| otherwise.

    The union is a no-op, since Tr(0) = 0 already puts 0 in D(0).
    """
    return int(np.count_nonzero(power_trace(ctx, alpha) == a_fp % ctx.p))


def enumerate_M(ctx: FieldCtx, alpha: int, a_fp: int, c_fp: int, b: FqElem) -> list[FqElem]:
    if not b:
        raise ZeroB("M(a, c) needs b != 0")
    p = ctx.p
    mask = (power_trace(ctx, alpha) == a_fp % p) & (linear_trace(ctx, b) == c_fp % p)
    return [ctx.elem(int(n)) for n in np.flatnonzero(mask)]


def count_N(ctx: FieldCtx, alpha: int, a_fp: int, c_fp: int, b: FqElem) -> int:
    if not b:
        raise ZeroB("M(a, c) needs b != 0")
    return int(joint_histogram(ctx, alpha, b)[a_fp % ctx.p, c_fp % ctx.p])


# -- dispatch -------------------------------------------------------------------------

def evaluate_oracle(spec: SumSpec) -> CycInt | int | list[FqElem]:
    ctx = spec.ctx
    k = spec.kind
    if k == "S":
        return oracle_weil(ctx, spec.alpha, ctx.elem(spec.a_fq), ctx.elem(spec.b_fq))
    if k == "S0":
        return oracle_weil(ctx, spec.alpha, ctx.elem(spec.a_fq), ctx.zero)
    if k == "A":
        return oracle_A(ctx, spec.alpha, spec.a_fp)
    if k == "B":
        return oracle_B(ctx, spec.alpha, spec.a_fp, spec.c_fp, ctx.elem(spec.b_fq))
    if k == "nCount":
        return count_n(ctx, spec.alpha, spec.a_fp)
    if k == "NCount":
        return count_N(ctx, spec.alpha, spec.a_fp, spec.c_fp, ctx.elem(spec.b_fq))
    if k == "Dset":
        return enumerate_D(ctx, spec.alpha, spec.a_fp)
    if k == "Mset":
        return enumerate_M(ctx, spec.alpha, spec.a_fp, spec.c_fp, ctx.elem(spec.b_fq))
    if k == "GaussQ":
        return oracle_gauss_q(ctx)
    from .cyclotomic import gauss_sum_prime

    return gauss_sum_prime(spec.p)
