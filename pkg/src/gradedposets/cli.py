"""Command-line entry point: ``gradedposets <command> ...``.

Exit status is 0 on success, 1 when a verification finds a mismatch and 2 on
malformed input or out-of-range requests.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import genfun, oracle
from .asymptotics import ratio_report
from .poset import (
    contains_2plus2,
    contains_3plus1,
    dump_exchange,
    is_strongly_graded,
    is_vigilant,
    load_exchange,
    rank_function,
    to_dot,
)
from .series import egf_count, psi
from .structure import LegalityMode, decompose_ordinal, is_legal, trim, word_of

MAX_ORDER = 16


class UsageError(Exception):
    pass


def _emit_rows(header: list[str], rows: list[list], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps([dict(zip(header, map(str, r))) for r in rows], indent=2) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    else:
        cells = [header] + [[str(c) for c in r] for r in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        for r in cells:
            out.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def _check_order(n: int) -> None:
    if n < 0:
        raise UsageError("order must be nonnegative")
    if n > MAX_ORDER:
        raise UsageError(f"order {n} exceeds the configured bound {MAX_ORDER}")


# -- commands ---------------------------------------------------------------------------

def cmd_count(args, out) -> int:
    _check_order(args.max_n)
    if args.by_height and args.family == "semiorder":
        raise UsageError("semiorder counts have no height refinement")
    kind = f"{args.family}_by_height" if args.by_height else args.family
    table = genfun.count_table(kind, args.max_n)
    if args.format == "json":
        out.write(table.to_json() + "\n")
        return 0
    if args.by_height:
        ks = list(range(args.max_n + 1))
        header = ["n"] + [f"k={k}" for k in ks]
        rows = [[n] + [table.counts.get((n, k), 0) for k in ks] for n in range(args.max_n + 1)]
    else:
        header = ["n", "count"]
        rows = [[n, table.counts[n]] for n in range(args.max_n + 1)]
    _emit_rows(header, rows, args.format, out)
    return 0


def _verify_cells(max_n: int):
    """Yield ``(family, n, k, oracle, genfun)`` for every compared cell."""
    nx = max(max_n, 1)
    strong = genfun.strong_by_height_gf(True, nx)
    weak = genfun.weak_gf(True, nx)
    semi = genfun.semiorder_gf(nx)
    for n in range(max_n + 1):
        rep = oracle.brute_counts(n)
        for k in range(n + 1):
            yield "strong", n, k, rep.strong_avoiding.get(k, 0), egf_count(strong, n, k)
            yield "weak", n, k, rep.weak_avoiding.get(k, 0), egf_count(weak, n, k)
        yield "semiorder", n, None, rep.semiorder_total, egf_count(semi, n)


def cmd_verify(args, out) -> int:
    if not 0 <= args.max_n <= oracle.MAX_N:
        raise UsageError(f"--max-n must lie in 0..{oracle.MAX_N}")
    rows = []
    first_bad = None
    for fam, n, k, o, g in _verify_cells(args.max_n):
        ok = o == g
        rows.append([fam, n, "" if k is None else k, o, g, "ok" if ok else "MISMATCH"])
        if not ok and first_bad is None:
            first_bad = (fam, n, k, o, g)
    _emit_rows(["family", "n", "k", "oracle", "genfun", "status"], rows, args.format, out)
    if first_bad:
        fam, n, k, o, g = first_bad
        cell = f"{fam} n={n}" + ("" if k is None else f" k={k}")
        sys.stderr.write(f"mismatch at {cell}: oracle {o}, genfun {g}\n")
        return 1
    return 0


_FLAG_SYMBOL = {genfun.Flag.REQUIRED: "+", genfun.Flag.FORBIDDEN: "-", genfun.Flag.FREE: "."}


def cmd_quarks(args, out) -> int:
    if args.max_m < 1 or args.max_n < 1 or args.max_m * args.max_n > 20:
        raise UsageError("need 1 <= max-m, max-n and max-m * max-n <= 20")
    rows = []
    first_bad = None
    for flags in genfun.supported_families():
        name = "".join(_FLAG_SYMBOL[f] for f in flags.as_tuple())
        for m in range(1, args.max_m + 1):
            for n in range(1, args.max_n + 1):
                b = oracle.enumerate_bipartite(m, n, flags)
                c = genfun.quark_family_count(m, n, flags)
                rows.append([name, m, n, b, c, "ok" if b == c else "MISMATCH"])
                if b != c and first_bad is None:
                    first_bad = (name, m, n, b, c)
    _emit_rows(["family", "m", "n", "brute", "formula", "status"], rows, args.format, out)
    if first_bad:
        sys.stderr.write("mismatch at family {} m={} n={}: brute {}, formula {}\n".format(*first_bad))
        return 1
    return 0


SERIES = {
    "strong": lambda n: genfun.strong_gf(True, n),
    "strong-closed": lambda n: genfun.strong_gf(False, n),
    "strong-by-height": lambda n: genfun.strong_by_height_gf(True, n),
    "weak": lambda n: genfun.weak_gf(True, n, with_t=False),
    "weak-by-height": lambda n: genfun.weak_gf(True, n),
    "semiorder": genfun.semiorder_gf,
    "indecomposable": genfun.strong_indecomposable_gf,
    "psi": lambda n: psi((n, 0, 0)),
}


def cmd_series(args, out) -> int:
    _check_order(args.order)
    S = SERIES[args.which](max(args.order, 1))
    S = S.restrict((args.order,) + S.bounds[1:])
    rows = [list(r) for r in S.dump()]
    if args.format == "json":
        out.write(json.dumps({"series": args.which, "bounds": list(S.bounds),
                              "coefficients": [[i, j, k, a, b] for i, j, k, a, b in rows]}, indent=2) + "\n")
        return 0
    _emit_rows(["i", "j", "k", "numerator", "denominator"], rows, args.format, out)
    return 0


def cmd_asymptotics(args, out) -> int:
    _check_order(args.max_n)
    if args.max_n < 1:
        raise UsageError("--max-n must be at least 1")
    if args.terms < 10:
        raise UsageError("--terms must be at least 10")
    rep = ratio_report(args.max_n, args.terms)
    if args.format == "json":
        out.write(rep.to_json() + "\n")
    elif args.format == "csv":
        out.write(rep.to_csv())
    else:
        out.write(f"C1 = {rep.c1:.30g}\nC2 = {rep.c2:.30g}\n")
        rows = [[r.n, str(r.psi_n), f"{r.ratio_psi:.12f}", f"{r.ratio_strong:.12f}", f"{r.ratio_weak:.12f}"]
                for r in rep.rows]
        _emit_rows(["n", "psi_n", "ratio_psi", "ratio_strong", "ratio_weak"], rows, "table", out)
    return 0


def classify_poset(P) -> dict:
    R = rank_function(P)
    info = {
        "n": P.n,
        "weakly_graded": R is not None,
        "strongly_graded": bool(R is not None and is_strongly_graded(R)),
        "contains_3plus1": contains_3plus1(P),
        "contains_2plus2": contains_2plus2(P),
    }
    if R is None:
        return info
    info["height"] = max(R.rank) + 1 if R.rank else 0
    info["rank"] = list(R.rank)
    info["vigilant"] = is_vigilant(R)
    if info["vigilant"]:
        T = trim(R)
        info["placeholders"] = T.n_unlabeled
        try:
            parts = decompose_ordinal(T)
            words = []
            for i, part in enumerate(parts):
                if part.height < 2:
                    words.append("height 1 (single placeholder)")
                    continue
                mode = (LegalityMode.STRONG if info["strongly_graded"]
                        else LegalityMode.for_summand(i, len(parts)))
                rb = mode in (LegalityMode.WEAK_BOTTOM, LegalityMode.WEAK_BOTH)
                rt = mode in (LegalityMode.WEAK_TOP, LegalityMode.WEAK_BOTH)
                w = word_of(part, rb, rt)
                words.append(f"{w}{'' if is_legal(w, mode) else ' (illegal)'}")
            info["summands"] = words
        except ValueError as exc:
            info["decomposition_error"] = str(exc)
    return info


def cmd_classify(args, out) -> int:
    try:
        with open(args.path, encoding="utf-8") as fh:
            P = load_exchange(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {args.path}: {exc.strerror}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    info = classify_poset(P)
    if args.format == "json":
        out.write(json.dumps(info, indent=2, ensure_ascii=False) + "\n")
    else:
        grade = ("strongly graded" if info["strongly_graded"]
                 else "weakly graded" if info["weakly_graded"] else "not weakly graded")
        avoid = "contains 3+1" if info["contains_3plus1"] else "avoids 3+1"
        out.write(f"{grade}; {avoid}\n")
        out.write(f"contains 2+2: {'yes' if info['contains_2plus2'] else 'no'}\n")
        if info["weakly_graded"]:
            out.write(f"height: {info['height']}\n")
            out.write(f"vigilant: {'yes' if info['vigilant'] else 'no'}\n")
        if "summands" in info:
            out.write(f"placeholders: {info['placeholders']}\n")
            for i, w in enumerate(info["summands"]):
                out.write(f"summand {i}: {w}\n")
        if "decomposition_error" in info:
            out.write(f"decomposition: {info['decomposition_error']}\n")
        out.write(f"covers: {dump_exchange(P)}\n")
    if args.dot:
        R = rank_function(P)
        if R is None:
            raise UsageError("DOT export needs a weakly graded poset")
        out.write(to_dot(R))
    return 0


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gradedposets", description="Count graded (3+1)-avoiding posets.")
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp):
        sp.add_argument("--format", choices=["table", "json", "csv"], default="table")

    c = sub.add_parser("count", help="counts from the generating functions")
    c.add_argument("family", choices=["strong", "weak", "semiorder"])
    c.add_argument("--max-n", type=int, default=10)
    c.add_argument("--by-height", action="store_true")
    fmt(c)
    c.set_defaults(func=cmd_count)

    v = sub.add_parser("verify", help="exhaustive oracle versus generating functions")
    v.add_argument("--max-n", type=int, default=6)
    fmt(v)
    v.set_defaults(func=cmd_verify)

    q = sub.add_parser("quarks", help="bipartite brute force versus closed forms")
    q.add_argument("--max-m", type=int, default=4)
    q.add_argument("--max-n", type=int, default=4)
    fmt(q)
    q.set_defaults(func=cmd_quarks)

    s = sub.add_parser("series", help="dump series coefficients")
    s.add_argument("which", choices=sorted(SERIES))
    s.add_argument("--order", type=int, default=8)
    fmt(s)
    s.set_defaults(func=cmd_series)

    a = sub.add_parser("asymptotics", help="ratio diagnostics against psi_n")
    a.add_argument("--max-n", type=int, default=16)
    a.add_argument("--terms", type=int, default=12)
    fmt(a)
    a.set_defaults(func=cmd_asymptotics)

    k = sub.add_parser("classify", help="classify a poset from a JSON exchange file")
    k.add_argument("path")
    k.add_argument("--dot", action="store_true")
    fmt(k)
    k.set_defaults(func=cmd_classify)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def run(argv) -> tuple[int, str]:
    """Run a command and capture its standard output."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
