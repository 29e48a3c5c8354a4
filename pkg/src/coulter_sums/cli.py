"""Command-line front end: ``coulter-sums {eval,verify,field-info,enumerate}``.

Exit codes: 0 success, 2 usage or domain error, 3 mismatch or failed sweep.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from math import gcd

from . import closed_forms as cf
from .errors import CoulterError, EvenEOverD
from .field import FieldCtx, build_field, parse_element
from .harness import GridSpec, sweep, value_json
from .oracles import SumSpec, evaluate_oracle

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISMATCH = 3

SUM_KINDS = {
    "A": "A",
    "B": "B",
    "S": "S",
    "S0": "S0",
    "n": "nCount",
    "N": "NCount",
    "gaussP": "GaussP",
    "gaussQ": "GaussQ",
}


class UsageError(Exception):
    pass


def poly_str(coeffs) -> str:
    """Monic polynomial from low-to-high coefficients, e.g. (1, 0, 1) -> x^2 + 1."""
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if not c:
            continue
        mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
        if not mono:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(terms) or "0"


def _field(args) -> FieldCtx:
    return build_field(args.p, args.e)


def _element(text: str, ctx: FieldCtx):
    try:
        return parse_element(text, ctx)
    except ValueError as exc:
        raise UsageError(f"bad element {text!r}: {exc}") from exc


def build_spec(args) -> SumSpec:
    kind = SUM_KINDS[args.sum]
    ctx = _field(args)
    fields: dict = {}
    if kind in ("S", "S0"):
        if args.a is None:
            raise UsageError(f"--sum {args.sum} needs --a")
        fields["a_fq"] = int(_element(args.a, ctx))
    elif kind in ("A", "B", "nCount", "NCount"):
        if args.a is None:
            raise UsageError(f"--sum {args.sum} needs --a")
        try:
            fields["a_fp"] = int(args.a) % args.p
        except ValueError as exc:
            raise UsageError(f"--a must be an integer residue for --sum {args.sum}") from exc
    if kind in ("B", "NCount"):
        if args.c is None:
            raise UsageError(f"--sum {args.sum} needs --c")
        fields["c_fp"] = args.c % args.p
    if kind in ("S", "B", "NCount"):
        if args.b is None:
            raise UsageError(f"--sum {args.sum} needs --b")
        fields["b_fq"] = int(_element(args.b, ctx))
    return SumSpec(args.p, args.e, args.alpha, kind, **fields)


def _closed(spec: SumSpec) -> tuple[dict, str, dict]:
    r = cf.evaluate_closed(spec)
    extra: dict = {}
    if isinstance(r, cf.ClosedResult):
        if r.gamma is not None:
            extra["gamma"] = int(r.gamma)
            extra["gamma_trace"] = r.gamma_trace
        return value_json(r.expand()), r.branch.case_id, extra
    if spec.kind == "NCount":
        ctx = spec.ctx
        g, t = cf.gamma_trace(ctx, spec.alpha, ctx.elem(spec.b_fq))
        extra = {"gamma": int(g), "gamma_trace": t}
        _, label = cf.closed_B_from_trace(spec.p, spec.e, spec.a_fp, spec.c_fp, t)
        return value_json(r), label, extra
    if spec.kind == "nCount":
        return value_json(r), cf.closed_A(spec.p, spec.e, spec.alpha, spec.a_fp).branch.case_id, extra
    return value_json(r), "", extra


def evaluate(spec: SumSpec, mode: str) -> dict:
    record: dict = {"spec": spec.to_dict(), "branch": "", "mode": mode}
    oracle = closed = None
    if mode in ("closed", "both"):
        try:
            closed, record["branch"], extra = _closed(spec)
            record.update(extra)
        except EvenEOverD as exc:
            if mode == "closed":
                raise
            record["notice"] = f"{exc}; falling back to enumeration"
            mode = "oracle"
    if mode in ("oracle", "both"):
        oracle = value_json(evaluate_oracle(spec))
    if mode == "oracle":
        record.update(value=oracle, mode="oracle")
    elif mode == "closed":
        record.update(value=closed, mode="closed-form")
    else:
        record.update(value=oracle, mode="both(equal)" if oracle == closed else "both(MISMATCH)")
        if oracle != closed:
            record["closed_value"] = closed
    return record


def _value_text(v: dict) -> str:
    if v["kind"] == "int":
        return str(v["int"])
    terms = [f"{c}*z^{k}" if k else str(c) for k, c in enumerate(v["coeffs"]) if c]
    return (" + ".join(terms) or "0") + f"  (z = zeta_{v['p']})"


def _emit(record: dict, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(record, sort_keys=True) + "\n")
        return
    for k, v in record.items():
        if k in ("value", "closed_value"):
            v = _value_text(v)
        elif isinstance(v, dict):
            v = " ".join(f"{a}={b}" for a, b in v.items())
        print(f"{k:12} {v}")


def cmd_eval(args) -> int:
    spec = build_spec(args)
    try:
        record = evaluate(spec, args.mode)
    except EvenEOverD as exc:
        print(f"error: {exc}; use --mode oracle for enumeration", file=sys.stderr)
        return EXIT_USAGE
    _emit(record, args.format)
    return EXIT_MISMATCH if record["mode"] == "both(MISMATCH)" else EXIT_OK


def grid_from_args(args) -> GridSpec:
    kw: dict = {}
    if args.primes:
        try:
            kw["primes"] = tuple(int(t) for t in args.primes.split(","))
        except ValueError as exc:
            raise UsageError(f"--primes must be a comma-separated list: {args.primes!r}") from exc
    if args.max_q is not None:
        kw["max_q"] = args.max_q
    if args.alphas:
        kw["alphas"] = tuple(int(t) for t in args.alphas.split(","))
    policy = args.b_policy
    if policy == "exhaustive":
        kw["b_threshold"] = kw.get("max_q", GridSpec().max_q)
    elif policy.startswith("sample:"):
        try:
            kw["b_samples"] = int(policy.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"bad --b-policy {policy!r}") from exc
    else:
        raise UsageError(f"--b-policy must be exhaustive or sample:N, not {policy!r}")
    if args.seed is not None:
        kw["seed"] = args.seed
    kw["parity"] = args.parity
    kw["weil"] = not args.no_weil
    if args.weil_samples is not None:
        kw["weil_samples"] = args.weil_samples
    if args.self_test_mutate is not None:
        kw["mutate"] = args.self_test_mutate or cf.DOCUMENTED_MUTANT
        if kw["mutate"] not in cf.ALL_LABELS:
            raise UsageError(f"unknown branch label {kw['mutate']!r}")
    return GridSpec(**kw)


def cmd_verify(args) -> int:
    grid = grid_from_args(args)
    report = sweep(grid, workers=args.workers)
    text = report.to_json(include_timing=args.timing)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    status = "PASS" if report.passed else "FAIL"
    print(
        f"{status}: {report.points_checked} points, {len(report.discrepancies)} discrepancies, "
        f"{len(report.uncovered)} uncovered branches, {len(report.skipped)} skipped, "
        f"{report.wall_time:.1f}s",
        file=sys.stderr,
    )
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_field_info(args) -> int:
    ctx = _field(args)
    info = {
        "p": ctx.p,
        "e": ctx.e,
        "q": ctx.q,
        "modulus": poly_str(ctx.modulus),
        "modulus_coeffs": list(ctx.modulus),
        "theta": int(ctx.theta),
        "theta_coeffs": list(ctx.theta.coeffs),
        "basis_traces": list(ctx.trace_vector),
    }
    try:
        ctx.check_enumerable()
        traces = ctx.vtrace(ctx.all_coeffs).astype("int64")
        info["trace_table_sha256"] = hashlib.sha256(traces.tobytes()).hexdigest()
    except CoulterError:
        info["trace_table_sha256"] = None
    if args.format == "json":
        sys.stdout.write(json.dumps(info, sort_keys=True) + "\n")
    else:
        for k, v in info.items():
            print(f"{k:18} {v}")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    ctx = _field(args)
    if args.a is None:
        raise UsageError("--a is required")
    a = int(args.a) % args.p
    if args.set == "D":
        spec = SumSpec(args.p, args.e, args.alpha, "Dset", a_fp=a)
    else:
        if args.c is None or args.b is None:
            raise UsageError("--set M needs --c and --b")
        b = int(_element(args.b, ctx))
        spec = SumSpec(args.p, args.e, args.alpha, "Mset", a_fp=a, c_fp=args.c % args.p, b_fq=b)
    members = [int(x) for x in evaluate_oracle(spec)]
    record: dict = {"spec": spec.to_dict(), "elements": members, "count": len(members)}
    if (args.e // gcd(args.alpha, args.e)) % 2:
        if args.set == "D":
            closed = cf.closed_n(args.p, args.e, args.alpha, a)
        else:
            closed = cf.closed_N(ctx, args.alpha, a, spec.c_fp, ctx.elem(spec.b_fq))
        record["closed_count"] = closed
        record["mode"] = "both(equal)" if closed == len(members) else "both(MISMATCH)"
    else:
        record["mode"] = "oracle"
        record["notice"] = str(EvenEOverD(args.e, args.alpha))
    if args.format == "json":
        sys.stdout.write(json.dumps(record, sort_keys=True) + "\n")
    else:
        print("{" + ", ".join(map(str, members)) + "}")
        for k in ("count", "closed_count", "mode", "notice"):
            if k in record:
                print(f"{k:12} {record[k]}")
    return EXIT_MISMATCH if record["mode"] == "both(MISMATCH)" else EXIT_OK


def _field_flags(p: argparse.ArgumentParser, alpha: bool = True) -> None:
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    if alpha:
        p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--format", choices=("json", "table"), default="table")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coulter-sums", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate one sum by enumeration and/or closed form")
    _field_flags(ev)
    ev.add_argument("--sum", required=True, choices=sorted(SUM_KINDS))
    ev.add_argument("--a", help="residue for A/B/n/N, element SPEC for S/S0")
    ev.add_argument("--c", type=int)
    ev.add_argument("--b", help="element SPEC: theta^k or coefficients c0,c1,...")
    ev.add_argument("--mode", choices=("oracle", "closed", "both"), default="both")
    ev.set_defaults(func=cmd_eval)

    ve = sub.add_parser("verify", help="run a verification sweep and write a JSON report")
    ve.add_argument("--primes", help="comma-separated odd primes")
    ve.add_argument("--max-q", type=int)
    ve.add_argument("--alphas", help="comma-separated alphas (default: all)")
    ve.add_argument("--b-policy", default="sample:5", help="exhaustive or sample:N")
    ve.add_argument("--seed", type=int)
    ve.add_argument("--parity", choices=("odd", "even", "both"), default="both")
    ve.add_argument("--weil-samples", type=int)
    ve.add_argument("--no-weil", action="store_true", help="skip the S(a, b) comparisons")
    ve.add_argument("--workers", type=int, default=1)
    ve.add_argument("--out", help="report path (default: stdout)")
    ve.add_argument("--timing", action="store_true", help="include wall_time in the report")
    ve.add_argument(
        "--self-test-mutate",
        nargs="?",
        const="",
        default=None,
        metavar="LABEL",
        help="negate one closed-form branch; the sweep must then fail",
    )
    ve.set_defaults(func=cmd_verify)

    fi = sub.add_parser("field-info", help="modulus, primitive element and trace data")
    _field_flags(fi, alpha=False)
    fi.set_defaults(func=cmd_field_info)

    en = sub.add_parser("enumerate", help="list the level sets D(a) or M(a, c)")
    _field_flags(en)
    en.add_argument("--set", choices=("D", "M"), required=True)
    en.add_argument("--a")
    en.add_argument("--c", type=int)
    en.add_argument("--b")
    en.set_defaults(func=cmd_enumerate)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (UsageError, CoulterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
