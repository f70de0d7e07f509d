"""Command-line surface: expansions, permutations, verifier suites, reports.

Exit codes: 0 success, 1 a verify suite found an assertion failure,
2 usage or parse error, 3 resource limit (size, precision, stream end).
All file output is UTF-8 and newline-terminated; figures requested with
--plot are rendered next to the delimited output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import cfkit, theorems
from .cfkit import (
    CertifiedAlpha,
    EnsembleConfig,
    convergents,
    gauss_kuzmin_stream,
    is_palindrome_prefix,
    check_palindrome_pq_biconditional,
    check_determinant_identity,
    hurwitz_scan,
    parse_alpha_spec,
)
from .errors import (
    KronpermError,
    ParseError,
    PeriodNotFound,
    PrecisionBudgetExceeded,
    SizeLimit,
    StreamExhausted,
    StructureViolation,
)
from .permutations import (
    build_pi_auto,
    build_pi_modular,
    cycle_decompose,
    exchange_check,
    iter_convergents,
)
from .surd import QuadraticSurd

DEFAULT_SIZE_LIMIT = 10 ** 6
ENV_PRECISION_BUDGET = "KRONPERM_PRECISION_BUDGET"
JSON_INT_LIMIT = 1 << 53
DECIMAL_PLACES = 12


@dataclass
class RunConfig:
    output_format: str
    out: str | None
    plot: str | None
    precision_budget: int
    size_limit: int


# -- exact decimal rendering --------------------------------------------------

def _decimal_from_scaled(n: int, places: int) -> str:
    return f"{n // 10 ** places}.{n % 10 ** places:0{places}d}"


def fraction_to_decimal(f: Fraction, places: int = DECIMAL_PLACES) -> str:
    """Correctly rounded (half-up) decimal string of an exact rational."""
    scaled = f * 10 ** places
    n = (2 * scaled.numerator + scaled.denominator) // (2 * scaled.denominator)
    return _decimal_from_scaled(n, places)


def surd_to_decimal(v: QuadraticSurd, places: int = DECIMAL_PLACES) -> str:
    """Correctly rounded decimal string of a surd, via exact scaled floors."""
    twice = v.scale(2).floor_scaled(places)
    return _decimal_from_scaled((twice + 1) // 2, places)


def bracket_to_decimal(ctx: CertifiedAlpha, k: int, places: int = DECIMAL_PLACES) -> str:
    """Correctly rounded decimal of {k*alpha}, refining until rounding settles."""
    m = ctx.floor_multiple(k)
    while True:
        lo, hi = ctx.bracket()
        a = fraction_to_decimal(k * lo - m, places)
        b = fraction_to_decimal(k * hi - m, places)
        if a == b:
            return a
        if not ctx.refine():
            raise PrecisionBudgetExceeded(
                f"cannot round point {k} to {places} places"
            )


# -- report emission ----------------------------------------------------------

def _json_safe(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value) if abs(value) >= JSON_INT_LIMIT else value
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    return value


def _cell(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if value is None:
        return ""
    return str(value)


def _render_text(meta: dict, columns: list[str], rows: list[dict]) -> str:
    lines = [f"{k}: {_cell(v)}" for k, v in meta.items()]
    if rows:
        table = [columns] + [[_cell(r.get(c)) for c in columns] for r in rows]
        widths = [max(len(row[i]) for row in table) for i in range(len(columns))]
        lines.append("")
        for row in table:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _render_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _render_json(meta: dict, rows: list[dict]) -> str:
    return json.dumps({"meta": _json_safe(meta), "rows": _json_safe(rows)}, indent=2) + "\n"


def emit(config: RunConfig, meta: dict, columns: list[str], rows: list[dict],
         json_payload: dict | None = None) -> None:
    if config.output_format == "json":
        payload = json_payload if json_payload is not None else {
            "meta": _json_safe(meta), "rows": _json_safe(rows)
        }
        text = json.dumps(payload, indent=2) + "\n"
    elif config.output_format == "csv":
        text = _render_csv(columns, rows)
    else:
        text = _render_text(meta, columns, rows)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _lengths_str(sig) -> str:
    return ";".join(f"{length}:{count}" for length, count in sig.length_multiset)


def _cycles_str(sig) -> str:
    return "".join("(" + " ".join(str(k) for k in cycle) + ")" for cycle in sig.cycles)


# -- commands ------------------------------------------------------------------

def cmd_cf(args, config: RunConfig) -> int:
    stream = parse_alpha_spec(args.alpha)
    convs = convergents(stream, args.depth)
    rows = [
        {"index": c.index, "a": stream.coefficient(c.index), "p": str(c.p),
         "q": str(c.q), "side": c.side, "det_sign": c.det_sign}
        for c in convs
    ]
    meta = {"alpha": stream.label, "depth": args.depth}
    emit(config, meta, ["index", "a", "p", "q", "side", "det_sign"], rows)
    return 0


def cmd_perm(args, config: RunConfig) -> int:
    stream = parse_alpha_spec(args.alpha)
    n = args.n
    if n > config.size_limit:
        raise SizeLimit(f"n = {n} exceeds size limit {config.size_limit}")
    perm, builder = build_pi_auto(stream, n, config.precision_budget)
    sigma = perm.inverse()
    sig = cycle_decompose(sigma)
    meta = {
        "alpha": stream.label, "n": n, "builder": builder,
        "cycles": _cycles_str(sig), "lengths": _lengths_str(sig),
        "fixed_points": ",".join(str(k) for k in sig.fixed_points),
    }
    rows = [{"k": k, "pi": perm.images[k - 1], "sigma": sigma.images[k - 1]}
            for k in range(1, n + 1)]
    payload = {
        "alpha": stream.label,
        "n": n,
        "builder": builder,
        "cycles": [list(c) for c in sig.cycles],
        "lengths": {str(length): count for length, count in sig.length_multiset},
        "fixed_points": list(sig.fixed_points),
        "pi": [_json_safe(v) for v in perm.images],
        "sigma": [_json_safe(v) for v in sigma.images],
    }
    emit(config, meta, ["k", "pi", "sigma"], rows, json_payload=payload)
    return 0


def _parse_range(text: str) -> tuple[int, int]:
    parts = text.split("..")
    if len(parts) != 2:
        raise ParseError("range must look like A..B", text)
    lo, hi = int(parts[0]), int(parts[1])
    if lo < 1 or hi < lo:
        raise ParseError("range must be nonempty with A >= 1", text)
    return lo, hi


def cmd_scan(args, config: RunConfig) -> int:
    stream = parse_alpha_spec(args.alpha)
    lo, hi = _parse_range(args.range)
    if hi > config.size_limit:
        raise SizeLimit(f"range end {hi} exceeds size limit {config.size_limit}")
    rows = []
    from .permutations import signature_report

    for n in range(lo, hi + 1):
        sig, builder = signature_report(stream, n, config.precision_budget)
        rows.append({
            "n": n, "builder": builder, "lengths": _lengths_str(sig),
            "longest": sig.longest, "cycle_count": len(sig.cycles),
            "fixed_count": len(sig.fixed_points),
            "distinct_lengths": sig.distinct_cycle_lengths,
        })
    meta = {"alpha": stream.label, "range": args.range}
    if config.plot:
        from .plotting import render_scan

        render_scan(rows, config.plot, f"{stream.label}: n = {lo}..{hi}")
        meta["figure"] = config.plot
    emit(config, meta,
         ["n", "builder", "lengths", "longest", "cycle_count", "fixed_count",
          "distinct_lengths"], rows)
    return 0


def cmd_points(args, config: RunConfig) -> int:
    stream = parse_alpha_spec(args.alpha)
    n = args.n
    if n > config.size_limit:
        raise SizeLimit(f"n = {n} exceeds size limit {config.size_limit}")
    perm, builder = build_pi_auto(stream, n, config.precision_budget)
    rows = []
    surd = stream.surd
    ctx = None if surd is not None else CertifiedAlpha(stream, config.precision_budget)
    for k in range(1, n + 1):
        if surd is not None:
            x_k = surd_to_decimal(surd.scale(k).frac())
        else:
            x_k = bracket_to_decimal(ctx, k)
        rows.append({
            "k": k,
            "k_over_n": fraction_to_decimal(Fraction(k, n)),
            "x_k": x_k,
            "rank": perm.images[k - 1],
        })
    meta = {"alpha": stream.label, "n": n, "builder": builder}
    if config.plot:
        from .plotting import render_points

        render_points(rows, config.plot, f"{stream.label}: first {n} points")
        meta["figure"] = config.plot
    emit(config, meta, ["k", "k_over_n", "x_k", "rank"], rows)
    return 0


def cmd_ensemble(args, config: RunConfig) -> int:
    ens = EnsembleConfig(
        seed=args.seed,
        sample_count=args.samples,
        cf_depth=args.cf_depth,
        max_points_per_sample=args.max_points,
    )
    rows = []
    skipped = 0
    involutions = 0
    fixed_total = 0
    longest_fracs = []
    for s in range(ens.sample_count):
        stream = gauss_kuzmin_stream(ens, s)
        for conv in iter_convergents(stream):
            if conv.q > ens.max_points_per_sample:
                skipped += 1
                break
            perm = build_pi_modular(conv)
            sig = cycle_decompose(perm)
            pal = is_palindrome_prefix(stream, conv.index)
            case = theorems.classify_structure(perm, conv).case_label if pal else ""
            involution = sig.is_involution
            involutions += involution
            fixed_total += len(sig.fixed_points)
            longest_fracs.append(sig.longest / conv.q)
            rows.append({
                "sample": s, "index": conv.index, "q": conv.q,
                "palindromic": pal, "case_label": case,
                "lengths": _lengths_str(sig), "longest": sig.longest,
                "longest_frac": round(sig.longest / conv.q, 6),
                "fixed_count": len(sig.fixed_points),
                "involution": involution,
            })
    meta = {
        "seed": ens.seed, "samples": ens.sample_count, "cf_depth": ens.cf_depth,
        "max_points": ens.max_points_per_sample, "rows": len(rows),
        "oversized_skipped": skipped,
        "involution_fraction": round(involutions / len(rows), 6) if rows else 0.0,
        "mean_fixed_points": round(fixed_total / len(rows), 6) if rows else 0.0,
        "mean_longest_frac": round(sum(longest_fracs) / len(rows), 6) if rows else 0.0,
        "max_longest_frac": round(max(longest_fracs), 6) if rows else 0.0,
    }
    emit(config, meta,
         ["sample", "index", "q", "palindromic", "case_label", "lengths",
          "longest", "longest_frac", "fixed_count", "involution"], rows)
    return 0


# -- verify suites --------------------------------------------------------------

def _suite_fibonacci(args) -> tuple[dict, list[str], list[dict], int]:
    rows, failures = [], 0
    for n in range(1, args.max_index + 1):
        f_n = theorems.fibonacci(n)
        try:
            verdict = theorems.verify_fibonacci_theorem(n)
            rows.append({"n": n, "F_n": f_n, "case_label": verdict.case_label,
                         "ok": True, "note": ""})
        except StructureViolation as exc:
            failures += 1
            rows.append({"n": n, "F_n": f_n, "case_label": theorems.CASE_OTHER,
                         "ok": False, "note": str(exc)})
    meta = {"suite": "fibonacci", "max_index": args.max_index, "failures": failures}
    return meta, ["n", "F_n", "case_label", "ok", "note"], rows, failures


def _suite_quadratic(args) -> tuple[dict, list[str], list[dict], int]:
    rows, failures = [], 0
    for d in range(2, args.max_d + 1):
        root = int(d ** 0.5)
        if root * root == d:
            continue
        for res in theorems.verify_quadratic_theorem(
                QuadraticSurd.sqrt(d), args.periods, max_q=args.max_q):
            ok = res.conformant
            failures += not ok
            verdict = res.verdict
            rows.append({
                "alpha": f"surd:sqrt({d})", "d": d, "prefix": res.prefix_length,
                "n": res.convergent.q if res.convergent else "",
                "q": res.convergent.q if res.convergent else "",
                "p": str(res.convergent.p) if res.convergent else "",
                "det_sign": res.convergent.det_sign if res.convergent else "",
                "palindromic": res.palindromic,
                "case_label": verdict.case_label if verdict else "",
                "lengths": _lengths_str(verdict.signature) if verdict else "",
                "fixed_points": ",".join(str(k) for k in verdict.signature.fixed_points)
                                if verdict else "",
                "witnesses": ",".join(str(k) for k in verdict.witnesses)
                             if verdict else "",
                "ok": ok, "note": res.note or "",
            })
    meta = {"suite": "quadratic", "max_d": args.max_d, "periods": args.periods,
            "max_q": args.max_q, "failures": failures}
    return meta, ["alpha", "d", "prefix", "n", "q", "p", "det_sign", "palindromic",
                  "case_label", "lengths", "fixed_points", "witnesses", "ok",
                  "note"], rows, failures


def _suite_fixed_points(args) -> tuple[dict, list[str], list[dict], int]:
    rows, failures, findings = [], 0, 0
    for r in range(1, args.max_r + 1):
        try:
            scan = theorems.fixed_point_completeness_scan(r, 64, size_limit=args.max_q)
        except StructureViolation as exc:
            failures += 1
            rows.append({"r": r, "m": "", "q": "", "generator": "",
                         "predicted": "", "actual": "", "equal": "",
                         "ok": False, "note": str(exc)})
            continue
        for row in scan:
            findings += not row.equal
            rows.append({
                "r": row.r, "m": row.m, "q": row.q, "generator": row.generator,
                "predicted": row.predicted_count, "actual": row.actual_count,
                "equal": row.equal, "ok": True,
                "note": "" if row.equal else "finding: extra fixed points",
            })
    meta = {"suite": "fixed-points", "max_r": args.max_r, "max_q": args.max_q,
            "failures": failures, "conjecture_findings": findings}
    return meta, ["r", "m", "q", "generator", "predicted", "actual", "equal",
                  "ok", "note"], rows, failures


def _suite_exchange(args, config: RunConfig) -> tuple[dict, list[str], list[dict], int]:
    stream = parse_alpha_spec(args.alpha)
    targets = []
    if stream.surd is not None and args.periods:
        k = len(stream.surd.frac().cf_expansion().period)
        upto = args.periods * k - 1
        targets = [c for c in convergents(stream, upto) if c.q <= args.max_q]
    else:
        for conv in iter_convergents(stream):
            if conv.q > args.max_q:
                break
            if conv.side is None:
                break
            targets.append(conv)
    rows, failures = [], 0
    for conv in targets:
        cert = exchange_check(stream, conv, config.precision_budget)
        failures += not cert.verdict
        rows.append({
            "index": conv.index, "p": str(conv.p), "q": str(conv.q),
            "verdict": cert.verdict, "shift_bound": cert.shift_bound,
            "min_gap": cert.min_gap,
        })
    meta = {"suite": "exchange", "alpha": stream.label,
            "convergents": len(rows), "failures": failures}
    return meta, ["index", "p", "q", "verdict", "shift_bound", "min_gap"], rows, failures


def _suite_identities(args, config: RunConfig) -> tuple[dict, list[str], list[dict], int]:
    stream = parse_alpha_spec(args.alpha)
    depth = args.depth
    length = stream.length
    if length is not None:
        depth = min(depth, length - 1)
    convs = convergents(stream, depth)
    frac = stream.fractional()
    hurwitz = {}
    try:
        for rep in hurwitz_scan(stream, depth, config.precision_budget):
            hurwitz[rep.index] = rep.satisfies
    except PrecisionBudgetExceeded:
        for n in range(depth + 1):
            if n in hurwitz:
                continue
            try:
                rep = hurwitz_scan(stream, n, config.precision_budget)[-1]
                hurwitz[n] = rep.satisfies
            except PrecisionBudgetExceeded:
                hurwitz[n] = None
    rows, failures = [], 0
    for n, conv in enumerate(convs):
        det_ok = True
        if n >= 1:
            det_ok = check_determinant_identity(convs[n - 1], conv) in (1, -1)
        pal_ok = ""
        if n >= 1:
            pal_ok = check_palindrome_pq_biconditional(frac, n)
            failures += not pal_ok
        failures += not det_ok
        h = hurwitz.get(n)
        rows.append({
            "index": n, "a": stream.coefficient(n), "det": conv.det_sign,
            "det_ok": det_ok, "palindrome_pq_ok": pal_ok,
            "hurwitz": "undecided" if h is None else h,
        })
    cassini_ok = all(theorems.cassini_check(n) for n in range(3, 201))
    failures += not cassini_ok
    meta = {"suite": "identities", "alpha": stream.label, "depth": depth,
            "cassini_n_max": 200, "cassini_ok": cassini_ok, "failures": failures}
    return meta, ["index", "a", "det", "det_ok", "palindrome_pq_ok", "hurwitz"], rows, failures


def cmd_verify(args, config: RunConfig) -> int:
    if args.suite == "fibonacci":
        meta, columns, rows, failures = _suite_fibonacci(args)
    elif args.suite == "quadratic":
        meta, columns, rows, failures = _suite_quadratic(args)
    elif args.suite == "fixed-points":
        meta, columns, rows, failures = _suite_fixed_points(args)
    elif args.suite == "exchange":
        meta, columns, rows, failures = _suite_exchange(args, config)
    else:
        meta, columns, rows, failures = _suite_identities(args, config)
    emit(config, meta, columns, rows)
    return 1 if failures else 0


# -- parser ----------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=["text", "json", "csv"], default="text")
    sub.add_argument("--out", default=None, help="write output to FILE")
    sub.add_argument("--precision-budget", type=int, default=None,
                     help=f"max CF terms for certified evaluation "
                          f"(default env {ENV_PRECISION_BUDGET} or "
                          f"{cfkit.DEFAULT_PRECISION_BUDGET})")
    sub.add_argument("--size-limit", type=int, default=DEFAULT_SIZE_LIMIT,
                     help="max point count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kronperm",
        description="Permutations induced by Kronecker sequences, exactly.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cf", help="convergent table for an alpha")
    p.add_argument("--alpha", default="named:phi")
    p.add_argument("--depth", type=int, default=10)
    _add_common(p)

    p = sub.add_parser("perm", help="permutation and cycle signature at one n")
    p.add_argument("--alpha", default="named:phi")
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("scan", help="signature table over a range of n")
    p.add_argument("--alpha", default="named:phi")
    p.add_argument("--range", required=True, help="inclusive range A..B")
    p.add_argument("--plot", default=None, help="render a figure to FILE")
    _add_common(p)

    p = sub.add_parser("points", help="CSV point dump (k, k/n, x_k, rank)")
    p.add_argument("--alpha", default="named:phi")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--plot", default=None, help="render the point set to FILE")
    _add_common(p)

    p = sub.add_parser("verify", help="run a verifier suite")
    p.add_argument("suite", choices=["fibonacci", "quadratic", "fixed-points",
                                     "exchange", "identities"])
    p.add_argument("--alpha", default="named:phi")
    p.add_argument("--max-index", type=int, default=25)
    p.add_argument("--max-d", type=int, default=50)
    p.add_argument("--max-r", type=int, default=10)
    p.add_argument("--max-q", type=int, default=10_000)
    p.add_argument("--periods", type=int, default=3)
    p.add_argument("--depth", type=int, default=40)
    _add_common(p)

    p = sub.add_parser("ensemble", help="Gauss-Kuzmin ensemble statistics")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--cf-depth", type=int, default=64)
    p.add_argument("--max-points", type=int, default=10_000)
    _add_common(p)

    return parser


_COMMANDS = {
    "cf": cmd_cf,
    "perm": cmd_perm,
    "scan": cmd_scan,
    "points": cmd_points,
    "verify": cmd_verify,
    "ensemble": cmd_ensemble,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else int(exc.code)
    budget = args.precision_budget
    if budget is None:
        budget = int(os.environ.get(ENV_PRECISION_BUDGET, cfkit.DEFAULT_PRECISION_BUDGET))
    config = RunConfig(
        output_format=args.format,
        out=args.out,
        plot=getattr(args, "plot", None),
        precision_budget=budget,
        size_limit=args.size_limit,
    )
    try:
        return _COMMANDS[args.command](args, config)
    except BrokenPipeError:
        # downstream consumer closed the pipe (e.g. | head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (SizeLimit, PrecisionBudgetExceeded, PeriodNotFound, StreamExhausted) as exc:
        print(f"kronperm: resource limit: {exc}", file=sys.stderr)
        return 3
    except KronpermError as exc:
        print(f"kronperm: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
