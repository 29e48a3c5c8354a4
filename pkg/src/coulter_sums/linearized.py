"""The Coulter polynomial C(x) = a^(p^alpha) x^(p^(2 alpha)) + a x as a linear map.

C is F_p-linear on GF(p^e), so deciding whether it permutes the field and
solving C(x) = -b^(p^alpha) are plain linear algebra over F_p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

from .errors import EvenEOverD, ZeroCoefficient
from .field import FieldCtx, FqElem


def coulter_eval(a: FqElem, alpha: int, x: FqElem) -> FqElem:
    return a.frobenius(alpha) * x.frobenius(2 * alpha) + a * x


def e_over_d(e: int, alpha: int) -> int:
    return e // gcd(alpha, e)


@dataclass(frozen=True)
class _Elimination:
    rank: int
    pivots: tuple[int, ...]
    # rows of P with P @ M = R (reduced row echelon form of M)
    transform: tuple[tuple[int, ...], ...]
    reduced: tuple[tuple[int, ...], ...]


def _rref(matrix: list[list[int]], p: int) -> _Elimination:
    n = len(matrix)
    cols = len(matrix[0]) if n else 0
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(matrix)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, n) if aug[i][c] % p), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][c], -1, p)
        aug[r] = [v * inv % p for v in aug[r]]
        for i in range(n):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(v - f * w) % p for v, w in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    return _Elimination(
        rank=r,
        pivots=tuple(pivots),
        transform=tuple(tuple(row[cols:]) for row in aug),
        reduced=tuple(tuple(row[:cols]) for row in aug),
    )


@dataclass(frozen=True)
class CoulterSolution:
    solvable: bool
    x0: FqElem | None
    kernel_dim: int


@dataclass(frozen=True)
class LinearizedMap:
    ctx: FieldCtx
    alpha: int
    a: FqElem
    matrix: tuple[tuple[int, ...], ...] = field(repr=False)

    def __call__(self, x: FqElem) -> FqElem:
        return coulter_eval(self.a, self.alpha, x)

    @cached_property
    def _elim(self) -> _Elimination:
        return _rref([list(r) for r in self.matrix], self.ctx.p)

    @property
    def rank(self) -> int:
        return self._elim.rank

    @property
    def kernel_dim(self) -> int:
        return self.ctx.e - self._elim.rank

    @cached_property
    def kernel_basis(self) -> tuple[tuple[int, ...], ...]:
        """Kernel basis in echelon form by highest nonzero index, fully reduced."""
        p, e = self.ctx.p, self.ctx.e
        el = self._elim
        basis = []
        for f in (c for c in range(e) if c not in el.pivots):
            v = [0] * e
            v[f] = 1
            for i, pc in enumerate(el.pivots):
                v[pc] = -el.reduced[i][f] % p
            basis.append(v)
        # the free column f is the highest nonzero index of its vector only if
        # every pivot column above it is zero there; enforce it by elimination
        basis = _echelon_high(basis, p)
        return tuple(tuple(v) for v in basis)

    def solve(self, rhs: FqElem) -> CoulterSolution:
        p, e = self.ctx.p, self.ctx.e
        el = self._elim
        w = [sum(t * v for t, v in zip(row, rhs.coeffs)) % p for row in el.transform]
        kd = e - el.rank
        if any(w[el.rank:]):
            return CoulterSolution(False, None, kd)
        x = [0] * e
        for i, pc in enumerate(el.pivots):
            x[pc] = w[i]
        if kd:
            x = _reduce_high(x, self.kernel_basis, p)
        return CoulterSolution(True, FqElem(tuple(x), self.ctx), kd)


def _lead(v) -> int:
    for i in range(len(v) - 1, -1, -1):
        if v[i]:
            return i
    return -1


def _echelon_high(vectors: list[list[int]], p: int) -> list[list[int]]:
    """Row-reduce so leading (highest) indices are distinct, monic, and cleared elsewhere."""
    vecs = [list(v) for v in vectors]
    out: list[list[int]] = []
    while vecs:
        vecs.sort(key=_lead, reverse=True)
        top = vecs.pop(0)
        lead = _lead(top)
        if lead < 0:
            continue
        inv = pow(top[lead], -1, p)
        top = [c * inv % p for c in top]
        vecs = [[(c - v[lead] * t) % p for c, t in zip(v, top)] for v in vecs]
        out.append(top)
    for i, v in enumerate(out):
        lead = _lead(v)
        for j, u in enumerate(out):
            if j != i and u[lead]:
                f = u[lead]
                out[j] = [(c - f * t) % p for c, t in zip(u, v)]
    return out


def _reduce_high(x: list[int], basis, p: int) -> list[int]:
    # zeroing x at every leading index gives the smallest integer encoding
    x = list(x)
    for v in basis:
        lead = _lead(v)
        f = x[lead]
        if f:
            x = [(c - f * t) % p for c, t in zip(x, v)]
    return x


def build_map(ctx: FieldCtx, a: FqElem, alpha: int) -> LinearizedMap:
    if not a:
        raise ZeroCoefficient("the Coulter polynomial needs a nonzero coefficient a")
    if alpha < 1:
        raise ValueError("alpha must be a positive integer")
    ctx._check(a)
    cols = [coulter_eval(a, alpha, ctx.elem([int(i == j) for i in range(ctx.e)])).coeffs for j in range(ctx.e)]
    matrix = tuple(tuple(cols[j][i] for j in range(ctx.e)) for i in range(ctx.e))
    return LinearizedMap(ctx, alpha, a, matrix)


def is_permutation(cmap: LinearizedMap) -> bool:
    return cmap.kernel_dim == 0


def coulter_criterion(ctx: FieldCtx, a: FqElem, alpha: int) -> bool:
    """Algebraic permutation test for C (no linear algebra).

    Always true when e/d is odd; for e = 2m with e/d even, C permutes the
    field iff a^((q-1)/(p^d+1)) != (-1)^(m/d).
    """
    e = ctx.e
    d = gcd(alpha, e)
    if (e // d) % 2:
        return True
    m = e // 2
    lhs = a ** ((ctx.q - 1) // (ctx.p**d + 1))
    return lhs != ctx.embed_prime((-1) ** ((m // d) % 2))


def solve_coulter(cmap: LinearizedMap, b: FqElem) -> CoulterSolution:
    """Solve C(x) = -b^(p^alpha); the smallest-encoding solution is returned."""
    if not b:
        raise ValueError("b must be nonzero")
    return cmap.solve(-b.frobenius(cmap.alpha))


def gamma_for(ctx: FieldCtx, alpha: int, b: FqElem) -> FqElem:
    """The unique root of x^(p^(2 alpha)) + x = -b^(p^alpha) (needs e/d odd)."""
    if e_over_d(ctx.e, alpha) % 2 == 0:
        raise EvenEOverD(ctx.e, alpha)
    sol = solve_coulter(unit_map(ctx, alpha), b)
    assert sol.solvable and sol.kernel_dim == 0
    return sol.x0


_UNIT_MAPS: dict[tuple[int, int, int], LinearizedMap] = {}


def unit_map(ctx: FieldCtx, alpha: int) -> LinearizedMap:
    key = (ctx.p, ctx.e, alpha)
    cmap = _UNIT_MAPS.get(key)
    if cmap is None:
        cmap = _UNIT_MAPS[key] = build_map(ctx, ctx.one, alpha)
    return cmap
