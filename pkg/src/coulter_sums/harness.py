"""Parameter sweeps comparing enumeration against the closed forms.

A sweep walks every (p, e, alpha) admitted by a :class:`GridSpec`, runs all
applicable comparisons, and folds the results into a :class:`VerifyReport`.
Points are independent; the merge is a sum of counters plus list
concatenation, and the report is sorted canonically at the end, so serial
and parallel runs produce the same report.
"""

from __future__ import annotations

import json
import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from math import gcd
from typing import Optional, Sequence

from . import closed_forms as cf
from .cyclotomic import CycInt, gauss_sum_prime
from .errors import EnumerationCeiling
from .field import FieldCtx, build_field, enumeration_ceiling, quad_char_prime
from .linearized import build_map
from .oracles import (
    SumSpec,
    _char_sum_B_all,
    joint_histogram,
    oracle_A_from_histogram,
    oracle_gauss_q,
    oracle_weil_row,
    trace_histogram,
)

log = logging.getLogger(__name__)

DEFAULT_PRIMES = (3, 5, 7, 11, 13)
DEFAULT_MAX_Q = 20_000
DEFAULT_SEED = 1


class Lcg64:
    """64-bit linear congruential generator (Knuth's MMIX constants).

    state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64);
    outputs are the top 31 bits of the new state.
    """

    MULT = 6364136223846793005
    INC = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next(self) -> int:
        self.state = (self.state * self.MULT + self.INC) & self.MASK
        return self.state >> 33

    def below(self, n: int) -> int:
        return self.next() % n


def _point_seed(seed: int, p: int, e: int, alpha: int, stream: int) -> int:
    return (seed * 1_000_003 + p * 10_007 + e * 101 + alpha * 7 + stream) & Lcg64.MASK


@dataclass(frozen=True)
class GridSpec:
    primes: tuple[int, ...] = DEFAULT_PRIMES
    max_q: int = DEFAULT_MAX_Q
    alphas: str | tuple[int, ...] = "all"
    b_threshold: int = 343  # b exhaustive for q <= threshold
    b_samples: int = 5
    seed: int = DEFAULT_SEED
    parity: str = "both"  # which e/d parities to visit: odd, even, both
    weil: bool = True
    weil_threshold: int = 343
    weil_samples: int = 25
    mutate: Optional[str] = None

    def __post_init__(self):
        if self.parity not in ("odd", "even", "both"):
            raise ValueError(f"parity must be odd, even or both, not {self.parity!r}")
        if self.b_samples < 1 or self.weil_samples < 1:
            raise ValueError("sample counts must be at least 1")
        if self.max_q > enumeration_ceiling():
            raise EnumerationCeiling(f"max_q={self.max_q} exceeds the enumeration ceiling")

    def points(self) -> list[tuple[int, int, int]]:
        out = []
        for p in sorted(self.primes):
            e = 1
            while p**e <= self.max_q:
                alphas = range(1, e + 1) if self.alphas == "all" else [a for a in self.alphas]
                for alpha in alphas:
                    odd = (e // gcd(alpha, e)) % 2 == 1
                    if self.parity == "both" or (self.parity == "odd") == odd:
                        out.append((p, e, alpha))
                e += 1
        return out

    def required_labels(self) -> tuple[str, ...]:
        req: tuple[str, ...] = ()
        if self.parity in ("odd", "both"):
            req += cf.B_LABELS
        if self.parity in ("even", "both") and self.weil:
            req += cf.S0_EVEN_LABELS
        return req

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["primes"] = list(self.primes)
        if d["alphas"] != "all":
            d["alphas"] = list(d["alphas"])
        return d


@dataclass
class VerifyReport:
    points_checked: int = 0
    discrepancies: list[dict] = field(default_factory=list)
    branch_coverage: dict[str, int] = field(default_factory=dict)
    skipped: list[dict] = field(default_factory=list)
    not_applicable: int = 0
    uncovered: list[str] = field(default_factory=list)
    grid: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.discrepancies and not self.uncovered

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "passed": self.passed,
            "points_checked": self.points_checked,
            "discrepancies": self.discrepancies,
            "branch_coverage": self.branch_coverage,
            "uncovered": self.uncovered,
            "skipped": self.skipped,
            "not_applicable": self.not_applicable,
            "grid": self.grid,
        }
        if include_timing:
            d["wall_time"] = round(self.wall_time, 3)
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class ClosedFailure:
    """A closed form that raised instead of returning; never equal to anything."""

    message: str

    def __eq__(self, other):
        return False

    def __ne__(self, other):
        return True

    __hash__ = None


def _attempt(fn, *args):
    # internal consistency checks in the closed forms raise AssertionError;
    # in a sweep that is a discrepancy, not a crash
    try:
        return fn(*args)
    except AssertionError as exc:
        return ClosedFailure(str(exc))


def value_json(v) -> dict:
    if isinstance(v, ClosedFailure):
        return {"kind": "error", "message": v.message}
    if isinstance(v, CycInt):
        n = v.as_rational_integer()
        if n is not None:
            return {"kind": "int", "int": n}
        return {"kind": "cyclotomic", "coeffs": list(v.coeffs), "p": v.p}
    if v is None:
        return {"kind": "none"}
    return {"kind": "int", "int": int(v)}


class _Partial:
    """Accumulator for one (p, e, alpha) task."""

    def __init__(self):
        self.points = 0
        self.discrepancies: list[dict] = []
        self.coverage: Counter = Counter()
        self.skipped: list[dict] = []
        self.not_applicable = 0

    def check(self, spec: SumSpec, oracle, closed, label: str = "", what: str = "") -> None:
        self.points += 1
        if label:
            self.coverage[label] += 1
        if oracle != closed:
            self.discrepancies.append(
                {
                    "spec": spec.to_dict(),
                    "check": what or spec.kind,
                    "oracle": value_json(oracle),
                    "closed": value_json(closed),
                    "branch": label,
                }
            )


def _b_encodings(grid: GridSpec, ctx: FieldCtx, alpha: int) -> list[int]:
    if ctx.q <= grid.b_threshold:
        return list(range(1, ctx.q))
    rng = Lcg64(_point_seed(grid.seed, ctx.p, ctx.e, alpha, 0))
    theta = ctx.theta
    chosen: list[int] = []
    while len(chosen) < min(grid.b_samples, ctx.q - 1):
        enc = int(theta ** rng.below(ctx.q - 1))
        if enc not in chosen:
            chosen.append(enc)
    return sorted(chosen)


def _weil_pairs(grid: GridSpec, ctx: FieldCtx, alpha: int) -> dict[int, list[int]]:
    """a-encoding -> b-encodings to check; b = 0 is always included."""
    if ctx.q <= grid.weil_threshold:
        return {a: list(range(ctx.q)) for a in range(1, ctx.q)}
    rng = Lcg64(_point_seed(grid.seed, ctx.p, ctx.e, alpha, 1))
    theta = ctx.theta
    pairs: dict[int, set[int]] = {}
    count = 0
    while count < grid.weil_samples:
        a = int(theta ** rng.below(ctx.q - 1))
        b = int(theta ** rng.below(ctx.q - 1))
        bs = pairs.setdefault(a, {0})
        if b not in bs:
            bs.add(b)
            count += 1
    return {a: sorted(bs) for a, bs in sorted(pairs.items())}


def _run_identities_and_closed(grid: GridSpec, ctx: FieldCtx, alpha: int, out: _Partial) -> None:
    p, e, q = ctx.p, ctx.e, ctx.q
    odd = (e // gcd(alpha, e)) % 2 == 1
    hist = trace_histogram(ctx, alpha)
    A_or = {}
    for a in range(p):
        A_or[a] = oracle_A_from_histogram(hist, a, p)
        n = int(hist[a])
        spec = SumSpec(p, e, alpha, "A", a_fp=a)
        # n(a) = p^(e-1) + A(a)/p, i.e. p n(a) - q = A(a)
        out.check(spec, A_or[a].as_rational_integer(), p * n - q, what="identity n=p^(e-1)+A/p")
        if odd:
            r = cf.closed_A(p, e, alpha, a)
            out.check(spec, A_or[a], r.expand(), r.branch.case_id)
            nspec = SumSpec(p, e, alpha, "nCount", a_fp=a)
            out.check(nspec, n, _attempt(cf.closed_n, p, e, alpha, a))
            out.check(nspec, n, cf.closed_n_table(p, e, alpha, a), what="nCount table")
        else:
            out.not_applicable += 2
    out.check(SumSpec(p, e, alpha, "nCount", a_fp=0), int(hist.sum()), q, what="sum_a n(a) = q")

    for benc in _b_encodings(grid, ctx, alpha):
        b = ctx.elem(benc)
        H = joint_histogram(ctx, alpha, b)
        Bcounts = _char_sum_B_all(H, p)
        if odd:
            _, t = cf.gamma_trace(ctx, alpha, b)
        spec0 = SumSpec(p, e, alpha, "NCount", a_fp=0, c_fp=0, b_fq=benc)
        out.check(spec0, int(H.sum()), q, what="sum_ac N(a,c) = q")
        for a in range(p):
            out.check(
                SumSpec(p, e, alpha, "NCount", a_fp=a, c_fp=0, b_fq=benc),
                int(H[a].sum()),
                int(hist[a]),
                what="sum_c N(a,c) = n(a)",
            )
            for c in range(p):
                B_or = CycInt.from_counts([int(v) for v in Bcounts[a, c]], p)
                N = int(H[a, c])
                bspec = SumSpec(p, e, alpha, "B", a_fp=a, c_fp=c, b_fq=benc)
                A_int = A_or[a].as_rational_integer()
                B_int = B_or.as_rational_integer()
                composed = None if A_int is None or B_int is None else q + A_int + B_int
                out.check(bspec, p * p * N, composed, what="identity N=p^(e-2)+(A+B)/p^2")
                if odd:
                    r, label = cf.closed_B_from_trace(p, e, a, c, t)
                    out.check(bspec, B_int, r, label)
                    nspec = SumSpec(p, e, alpha, "NCount", a_fp=a, c_fp=c, b_fq=benc)
                    out.check(nspec, N, _attempt(cf.closed_N_from_trace, p, e, alpha, a, c, t))
                    out.check(nspec, N, cf.closed_N_table_from_trace(p, e, a, c, t), what="NCount table")
                else:
                    out.not_applicable += 2


def _run_weil(grid: GridSpec, ctx: FieldCtx, alpha: int, out: _Partial) -> None:
    p, e = ctx.p, ctx.e
    for aenc, bencs in _weil_pairs(grid, ctx, alpha).items():
        a = ctx.elem(aenc)
        row = oracle_weil_row(ctx, alpha, a, bencs)
        cmap = build_map(ctx, a, alpha)
        for benc, oracle in zip(bencs, row):
            b = ctx.elem(benc)
            r = cf.closed_S(ctx, alpha, a, b, cmap)
            kind = "S0" if benc == 0 else "S"
            spec = SumSpec(p, e, alpha, kind, a_fq=aenc, b_fq=benc)
            out.check(spec, oracle, r.expand(), r.branch.case_id)
            if benc == 0 and cmap.kernel_dim == 0:
                # the permutation formula at b = 0 must agree with S(a, 0)
                rp = cf.closed_S_perm(ctx, alpha, a, b, cmap)
                out.check(spec, oracle, rp.expand(), rp.branch.case_id, what="S perm at b=0")


def _run_gauss(ctx: FieldCtx, out: _Partial) -> None:
    p, e, q = ctx.p, ctx.e, ctx.q
    G = oracle_gauss_q(ctx)
    spec = SumSpec(p, e, 1, "GaussQ")
    out.check(spec, G, cf.closed_gauss_q(p, e).expand(), what="GaussQ closed")
    out.check(spec, (G * G.conj()).as_rational_integer(), q, what="G conj(G) = q")
    eta_m1 = ctx.embed_prime(-1).quad_char()
    out.check(spec, (G * G).as_rational_integer(), eta_m1 * q, what="G^2 = eta(-1) q")
    Gp = gauss_sum_prime(p)
    out.check(SumSpec(p, e, 1, "GaussP"), (Gp * Gp).as_rational_integer(), quad_char_prime(-1, p) * p, what="Gp^2")


def run_point(grid: GridSpec, p: int, e: int, alpha: int) -> dict:
    out = _Partial()
    prev = cf.get_mutant()
    cf.set_mutant(grid.mutate)
    try:
        ctx = build_field(p, e)
        try:
            ctx.check_enumerable()
        except EnumerationCeiling as exc:
            out.skipped.append({"p": p, "e": e, "alpha": alpha, "reason": str(exc)})
            return _partial_dict(out)
        _run_identities_and_closed(grid, ctx, alpha, out)
        if grid.weil:
            _run_weil(grid, ctx, alpha, out)
        if alpha == 1 or (grid.alphas != "all" and alpha == min(grid.alphas)):
            _run_gauss(ctx, out)
    finally:
        cf.set_mutant(prev)
    return _partial_dict(out)


def _partial_dict(out: _Partial) -> dict:
    return {
        "points": out.points,
        "discrepancies": out.discrepancies,
        "coverage": dict(out.coverage),
        "skipped": out.skipped,
        "not_applicable": out.not_applicable,
    }


def _run_point_args(args):
    return run_point(*args)


def _disc_key(d: dict) -> tuple:
    s = d["spec"]
    return (
        s["p"], s["e"], s["alpha"], s["kind"],
        s.get("a_fq", -1), s.get("a_fp", -1), s.get("c_fp", -1), s.get("b_fq", -1),
        d["check"],
    )


def merge(partials: Sequence[dict], grid: GridSpec) -> VerifyReport:
    rep = VerifyReport(grid=grid.to_dict())
    coverage = Counter({label: 0 for label in cf.ALL_LABELS})
    for part in partials:
        rep.points_checked += part["points"]
        rep.discrepancies.extend(part["discrepancies"])
        coverage.update(part["coverage"])
        rep.skipped.extend(part["skipped"])
        rep.not_applicable += part["not_applicable"]
    rep.discrepancies.sort(key=_disc_key)
    rep.skipped.sort(key=lambda s: (s["p"], s["e"], s["alpha"]))
    rep.branch_coverage = {k: coverage[k] for k in sorted(coverage)}
    rep.uncovered = sorted(label for label in grid.required_labels() if coverage[label] == 0)
    return rep


def sweep(grid: GridSpec, workers: int = 1) -> VerifyReport:
    start = time.perf_counter()
    tasks = [(grid, p, e, alpha) for p, e, alpha in grid.points()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_run_point_args, tasks))
    else:
        partials = []
        for t in tasks:
            log.debug("sweep point p=%d e=%d alpha=%d", t[1], t[2], t[3])
            partials.append(run_point(*t))
    rep = merge(partials, grid)
    rep.wall_time = time.perf_counter() - start
    return rep


# -- branch instances ---------------------------------------------------------------

def _label_compatible(case_id: str, p: int, e: int) -> bool:
    # labels carrying "e odd/even" or "p==r mod 4" can only fire on matching fields
    if "mod 4" in case_id and f"p=={p % 4} mod 4" not in case_id:
        return False
    if "| e odd" in case_id and e % 2 == 0 or "| e even" in case_id and e % 2 == 1:
        return False
    return True


def find_branch_instance(case_id: str, grid: GridSpec = GridSpec()) -> Optional[SumSpec]:
    """Smallest grid point, in canonical order, whose evaluation lands in ``case_id``."""
    if case_id not in cf.ALL_LABELS:
        log.info("unknown branch label %r", case_id)
        return None
    for p, e, alpha in grid.points():
        odd = (e // gcd(alpha, e)) % 2 == 1
        if not _label_compatible(case_id, p, e):
            continue
        ctx = build_field(p, e)
        if case_id.startswith("B[") and odd:
            for benc in range(1, ctx.q):
                _, t = cf.gamma_trace(ctx, alpha, ctx.elem(benc))
                for a in range(p):
                    for c in range(p):
                        if cf.closed_B_from_trace(p, e, a, c, t)[1] == case_id:
                            return SumSpec(p, e, alpha, "B", a_fp=a, c_fp=c, b_fq=benc)
        elif case_id.startswith("A[") and odd:
            for a in range(p):
                if cf.closed_A(p, e, alpha, a).branch.case_id == case_id:
                    return SumSpec(p, e, alpha, "A", a_fp=a)
        elif case_id.startswith("S0["):
            for aenc in range(1, ctx.q):
                if cf.closed_S_a0(ctx, alpha, ctx.elem(aenc)).branch.case_id == case_id:
                    return SumSpec(p, e, alpha, "S0", a_fq=aenc)
        elif case_id.startswith("S["):
            if odd != (case_id == "S[perm | e/d odd]"):
                continue
            for aenc in range(1, ctx.q):
                a = ctx.elem(aenc)
                cmap = build_map(ctx, a, alpha)
                for benc in range(1, ctx.q):
                    if cf.closed_S(ctx, alpha, a, ctx.elem(benc), cmap).branch.case_id == case_id:
                        return SumSpec(p, e, alpha, "S", a_fq=aenc, b_fq=benc)
    log.info("no grid point reaches %r", case_id)
    return None


def branch_table(grid: GridSpec = GridSpec()) -> dict[str, Optional[dict]]:
    out = {}
    for label in cf.ALL_LABELS:
        spec = find_branch_instance(label, grid)
        out[label] = None if spec is None else spec.to_dict()
    return out


def default_grid(**overrides) -> GridSpec:
    return replace(GridSpec(), **overrides)


__all__ = [
    "GridSpec",
    "VerifyReport",
    "Lcg64",
    "sweep",
    "run_point",
    "merge",
    "find_branch_instance",
    "branch_table",
    "default_grid",
]
