"""Command-line interface: ``bnstab <command> ...``.

Exit codes: 0 success, 3 undecided at the requested level, 4 known
unstable (or known not to reach the level), 5 table diff non-empty,
6 precondition violated, 7 a check failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .closure import (
    DEGENERATION_RULES,
    FULL_RULES,
    Grid,
    check_certificate,
    CertificateError,
    certificate_from_json,
    certificate_to_json,
    compare_tables,
    compute_closure,
    crosscheck_closed_forms,
    default_grid,
    thresholds_per_genus,
    unknown_pairs,
)
from .core import Status, Triple, normal_bundle_degree, normal_bundle_slope, rho
from .numtheory import b2, smallest_nondividing_prime, split_witness
from .reference import group_families, load_reference
from .rules import Characteristic, CertificateNode, exception_reason

EXIT_OK = 0
EXIT_UNKNOWN = 3
EXIT_UNSTABLE = 4
EXIT_DIFF = 5
EXIT_PRECONDITION = 6
EXIT_CHECK_FAILED = 7

LEVELS = {"semistable": Status.CERT_SEMISTABLE, "stable": Status.CERT_STABLE}
MAX_GRID_CELLS = 2_000_000


def _characteristic(args) -> Characteristic:
    return Characteristic.TWO if args.char_two else Characteristic.GENERIC


def _rules(args, base=FULL_RULES):
    rules = base
    for name in args.disable_rule or []:
        rules = rules.without(name)
    return rules


def _grid(args, r: int) -> Grid:
    g0 = default_grid(r, _characteristic(args))
    d_max = args.d_max if args.d_max is not None else g0.d_max
    g_max = args.g_max if args.g_max is not None else g0.g_max
    if (d_max + 1) * (g_max + 1) > MAX_GRID_CELLS:
        raise _Precondition(f"grid {d_max}x{g_max} exceeds the cap of {MAX_GRID_CELLS} cells")
    return Grid(r, d_max, g_max, _characteristic(args))


class _Precondition(Exception):
    pass


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def render_tree(node: CertificateNode) -> str:
    lines = []

    def walk(n: CertificateNode, depth: int) -> None:
        params = ", ".join(f"{k}={v}" for k, v in n.params)
        lines.append(f"{'  ' * depth}{n.triple} {n.status.value} by {n.rule.value}" + (f" [{params}]" if params else ""))
        for p in n.premises:
            walk(p, depth + 1)

    walk(node, 0)
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------- classify


def cmd_classify(args) -> int:
    d, g, r = args.d, args.g, args.r
    try:
        t = Triple(d, g, r)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if t.rho < 0:
        print(f"{t}: rho = {t.rho}; ρ < 0, not a Brill-Noether triple", file=sys.stderr)
        return EXIT_PRECONDITION
    if g < 1:
        print(f"{t}: genus 0 is out of scope", file=sys.stderr)
        return EXIT_PRECONDITION
    base = default_grid(r, _characteristic(args))
    grid = Grid(r, max(base.d_max, d), max(base.g_max, g), _characteristic(args))
    smap = compute_closure(grid, _rules(args), seed=args.seed)
    status = smap.status(d, g)
    want = LEVELS[args.level]
    cert = smap.certificate(d, g)
    out = io.StringIO()
    if args.format == "jsonl":
        rec = {
            "d": d,
            "g": g,
            "r": r,
            "rho": t.rho,
            "normal_degree": normal_bundle_degree(d, g, r),
            "slope": str(normal_bundle_slope(d, g, r)),
            "status": status.value,
            "characteristic": grid.characteristic.value,
            "certificate": json.loads(certificate_to_json(cert)) if cert else None,
        }
        out.write(json.dumps(rec, sort_keys=True) + "\n")
    else:
        out.write(f"triple: {t}\n")
        out.write(f"rho: {t.rho}\n")
        out.write(f"normal bundle degree: {normal_bundle_degree(d, g, r)}\n")
        out.write(f"normal bundle slope: {normal_bundle_slope(d, g, r)}\n")
        out.write(f"characteristic: {grid.characteristic.value}\n")
        out.write(f"status: {status.value}\n")
        reason = exception_reason(t)
        if reason:
            out.write(f"reason: {reason}\n")
        if cert is not None:
            out.write("certificate:\n" + render_tree(cert))
    _emit(args, out.getvalue())
    if status is Status.KNOWN_UNSTABLE:
        return EXIT_UNSTABLE
    if status is Status.KNOWN_STRICTLY_SEMISTABLE and want is Status.CERT_STABLE:
        return EXIT_UNSTABLE
    return EXIT_OK if status.level >= want.level else EXIT_UNKNOWN


# ---------------------------------------------------------------- table


def _family_label(d0: int, g0: int, k: int, period=(9, 12)) -> tuple[str, str]:
    if k == 0:
        return f"({d0},{g0})", ""
    return f"({period[0]}k+{d0}, {period[1]}k+{g0})", f"0 ≤ k ≤ {k}"


def render_pairs(pairs, fmt: str, r: int, period=(9, 12)) -> str:
    out = io.StringIO()
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["d", "g"])
        w.writerows(pairs)
    elif fmt == "jsonl":
        for d, g in pairs:
            out.write(json.dumps({"d": d, "g": g}) + "\n")
    elif r == 4:
        out.write("| (d,g) | k range |\n|---|---|\n")
        for d0, g0, k in group_families(pairs, period):
            a, b = _family_label(d0, g0, k, period)
            out.write(f"| {a} | {b} |\n")
    else:
        out.write("| d | g |\n|---|---|\n")
        for d, g in pairs:
            out.write(f"| {d} | {g} |\n")
    return out.getvalue()


def cmd_table(args) -> int:
    level = LEVELS[args.level]
    grid = _grid(args, args.r)
    smap = compute_closure(grid, _rules(args), seed=args.seed)
    pairs = unknown_pairs(smap, 2, level)
    text = render_pairs(pairs, args.format, args.r)
    code = EXIT_OK
    if args.r == 4:
        ref = load_reference()
        table = ref.semistable_unknown if level is Status.CERT_SEMISTABLE else ref.stable_unknown
        diff = compare_tables(smap, table, level)
        summary = io.StringIO()
        summary.write(f"pairs: {len(pairs)} (reference {len(table)})\n")
        summary.write(f"missing from engine: {diff.missing_from_engine}\n")
        summary.write(f"extra in engine: {diff.extra_in_engine}\n")
        for cert in diff.audit_certificates:
            summary.write(f"audit {cert.triple}:\n" + render_tree(cert))
        if args.format == "md":
            text += "\n" + summary.getvalue()
        else:
            sys.stderr.write(summary.getvalue())
        if not diff.empty:
            code = EXIT_DIFF
    _emit(args, text)
    return code


# ----------------------------------------------------------- thresholds


def cmd_thresholds(args) -> int:
    grid = _grid(args, args.r)
    base = FULL_RULES if args.rules == "full" else DEGENERATION_RULES
    smap = compute_closure(grid, _rules(args, base), seed=args.seed)
    r = args.r
    g_hi = args.g_hi if args.g_hi is not None else (13 if r == 4 else r * (r - 1) + 1)
    rows = []
    for g in range(2, g_hi + 1):
        d_min = next(d for d in range(grid.d_max + 1) if rho(d, g, r) >= 0)
        rows.append(
            (
                g,
                d_min,
                thresholds_per_genus(smap, g, Status.CERT_SEMISTABLE),
                thresholds_per_genus(smap, g, Status.CERT_STABLE),
            )
        )
    out = io.StringIO()
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["g", "d_min", "semistable", "stable"])
        w.writerows(rows)
    elif args.format == "jsonl":
        for g, dm, ss, st in rows:
            out.write(json.dumps({"g": g, "d_min": dm, "semistable": ss, "stable": st}) + "\n")
    else:
        out.write("| g | d_min | semistable | stable |\n|---|---|---|---|\n")
        for row in rows:
            out.write("| " + " | ".join("-" if x is None else str(x) for x in row) + " |\n")
    code = EXIT_OK
    if r == 4 and args.rules == "degeneration" and not args.disable_rule:
        ref = {(row.g, row.d_min, row.semistable, row.stable) for row in load_reference().thresholds}
        mismatched = [row for row in rows if row[0] <= 13 and tuple(row) not in ref]
        if mismatched:
            sys.stderr.write(f"rows differing from the reference: {mismatched}\n")
            code = EXIT_DIFF
    _emit(args, out.getvalue())
    return code


# ------------------------------------------------------------------- b2


def b2_row(r: int) -> dict:
    value = b2(r)
    w = split_witness(value, r)
    p = smallest_nondividing_prime(r - 1)
    flags = {
        "exact_when_5_coprime": (value == 2 * r + 2) if (r - 1) % 5 else None,
        "prime_bound": value <= 2 * r + Fraction(p - 1, 2),
        "linear_bound": None
        if r < 8
        else value <= (Fraction(5 * r - 6, 2) if r % 2 == 0 else Fraction(5 * r - 3, 2)),
        "large_r_bound": value <= Fraction(201, 100) * r + Fraction(2015, 1000) if r >= 1636 else None,
    }
    return {"r": r, "b2": value, "d1": w.d1, "d2": w.d2, **flags}


def cmd_b2(args) -> int:
    if not 4 <= args.r_min <= args.r_max:
        print("error: need 4 <= r-min <= r-max", file=sys.stderr)
        return EXIT_PRECONDITION
    rows = [b2_row(r) for r in range(args.r_min, args.r_max + 1)]
    keys = ["r", "b2", "d1", "d2", "exact_when_5_coprime", "prime_bound", "linear_bound", "large_r_bound"]
    cell = lambda v: "-" if v is None else ("pass" if v is True else "fail" if v is False else str(v))  # noqa: E731
    out = io.StringIO()
    if args.format == "jsonl":
        for row in rows:
            out.write(json.dumps(row) + "\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(keys)
        for row in rows:
            w.writerow([cell(row[k]) for k in keys])
    else:
        out.write("| " + " | ".join(keys) + " |\n|" + "---|" * len(keys) + "\n")
        for row in rows:
            out.write("| " + " | ".join(cell(row[k]) for k in keys) + " |\n")
    _emit(args, out.getvalue())
    failed = any(row[k] is False for row in rows for k in keys[4:])
    return EXIT_CHECK_FAILED if failed else EXIT_OK


# ---------------------------------------------------------- verify-cert


def cmd_verify_cert(args) -> int:
    with open(args.file, encoding="utf-8") as f:
        lines = [line for line in f.read().splitlines() if line.strip()]
    code = EXIT_OK
    for i, line in enumerate(lines, 1):
        try:
            cert = certificate_from_json(line)
            check_certificate(cert)
        except CertificateError as exc:
            print(f"certificate {i}: FAIL at {exc.node.triple} ({exc.node.rule.value}): {exc.reason}")
            code = EXIT_CHECK_FAILED
            continue
        except (ValueError, KeyError, TypeError) as exc:
            print(f"certificate {i}: malformed: {exc}")
            code = EXIT_CHECK_FAILED
            continue
        print(f"certificate {i}: ok {cert.triple} {cert.status.value} ({cert.size()} nodes)")
    return code


# ----------------------------------------------------------- crosscheck


def cmd_crosscheck(args) -> int:
    total = 0
    for r in args.r:
        grid = _grid(args, r)
        smap = compute_closure(grid, _rules(args))
        degree_only = args.degree_only or r != 4
        found = crosscheck_closed_forms(smap, degree_only=degree_only)
        total += len(found)
        print(f"r={r} grid={grid.d_max}x{grid.g_max} degree_only={degree_only}: {len(found)} violations")
        for v in found[: args.show]:
            print(f"  {v.triple}: {v.reason} requires {v.required.value}, closure has {v.actual.value}")
    return EXIT_CHECK_FAILED if total else EXIT_OK


# ----------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bnstab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=True):
        p.add_argument("--char-two", action="store_true", help="ground field of characteristic 2")
        p.add_argument("--format", choices=["md", "csv", "jsonl"], default="md")
        p.add_argument("--out", help="write output to FILE")
        p.add_argument("--seed", type=int, help="use a randomised rule schedule")
        p.add_argument("--disable-rule", action="append", help="drop a rule (repeatable)")
        if grid:
            p.add_argument("--d-max", type=int)
            p.add_argument("--g-max", type=int)

    p = sub.add_parser("classify", help="status and certificate of one triple")
    p.add_argument("d", type=int, nargs="?")
    p.add_argument("g", type=int, nargs="?")
    p.add_argument("r", type=int, nargs="?")
    p.add_argument("--d", dest="d_opt", type=int)
    p.add_argument("--g", dest="g_opt", type=int)
    p.add_argument("--r", dest="r_opt", type=int)
    p.add_argument("--level", choices=list(LEVELS), default="semistable")
    common(p, grid=False)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("table", help="undecided pairs at a level")
    p.add_argument("--r", type=int, default=4)
    p.add_argument("--level", choices=list(LEVELS), default="semistable")
    common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("thresholds", help="per-genus degree thresholds")
    p.add_argument("--r", type=int, default=4)
    p.add_argument("--rules", choices=["degeneration", "full"], default="degeneration")
    p.add_argument("--g-hi", type=int, help="largest genus row")
    common(p)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("b2", help="genus-2 split thresholds and their bounds")
    p.add_argument("--r-min", type=int, default=4)
    p.add_argument("--r-max", type=int, default=20)
    p.add_argument("--format", choices=["md", "csv", "jsonl"], default="md")
    p.add_argument("--out")
    p.set_defaults(func=cmd_b2)

    p = sub.add_parser("verify-cert", help="re-check certificates (one JSON object per line)")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify_cert)

    p = sub.add_parser("crosscheck", help="closed-form dominance check")
    p.add_argument("--r", type=int, nargs="+", default=[4])
    p.add_argument("--degree-only", action="store_true")
    p.add_argument("--show", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_crosscheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "classify":
        for name in ("d", "g", "r"):
            opt = getattr(args, f"{name}_opt")
            if opt is not None:
                setattr(args, name, opt)
        if None in (args.d, args.g, args.r):
            parser.error("classify needs d, g and r")
    try:
        return args.func(args)
    except _Precondition as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
