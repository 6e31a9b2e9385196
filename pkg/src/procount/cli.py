"""Command line: ``procount {tree,group,verify,reduce,perm}``.

Exit codes: 0 when everything checked passes, 1 when a check fails, 2 for
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import mekler, perm, suites, trees
from .fp_linalg import is_odd_prime
from .reduction import ReductionError, verify_main_theorem_instance

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _ints(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _seq(prefix: str, tail: str | None) -> trees.SequenceSpec:
    t = _ints(tail) if tail else (0, 0)
    if len(t) != 2:
        raise UsageError("--tail takes two integers a,b for x(k) = a*k + b")
    try:
        return trees.SequenceSpec(_ints(prefix), t)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _threads() -> int:
    raw = os.environ.get("PROCOUNT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"PROCOUNT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("PROCOUNT_THREADS must be >= 1")
    return n


def _check_config(args) -> None:
    if getattr(args, "p", None) is not None and not is_odd_prime(args.p):
        raise UsageError(f"--p must be an odd prime, got {args.p}")
    if getattr(args, "depth", None) is not None and args.depth < 1:
        raise UsageError("--depth must be >= 1")
    if getattr(args, "width", None) is not None and args.width < 1:
        raise UsageError("--width must be >= 1")


def _emit(data, out: str | None) -> None:
    text = json.dumps(data, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------


def cmd_tree(args) -> int:
    kind = args.kind
    if kind == "S_star":
        T = trees.SStar()
    elif kind == "S_k":
        T = trees.SK(args.k)
    elif kind == "S_omega":
        T = trees.SOmega()
    elif kind in ("R", "R_k"):
        T = trees.RK(args.k)
    elif kind == "T_x":
        T = trees.Tx(_seq(args.x or "", args.tail))
    else:
        raise UsageError(f"unknown tree kind {kind!r}")
    F = trees.expand(T, args.depth, args.width)
    _emit({"tree": trees.tree_request_to_json(T, args.depth, args.width),
           "level_counts": [len(lvl) for lvl in F.levels],
           "leaves": len(F.level(F.depth)),
           "nodes": F.to_json()}, args.out)
    return EXIT_OK


def cmd_group(args) -> int:
    if mekler.looks_labelled(args.expr):
        U = mekler.LabeledUniverse(args.p)
    elif args.graph == "matching":
        U = mekler.PlainUniverse.matching(args.p)
    else:
        U = mekler.PlainUniverse(args.p)
    try:
        u = mekler.parse_element(args.expr, U)
    except (mekler.ParseError, mekler.UniverseMismatch) as exc:
        raise UsageError(str(exc)) from None
    print(mekler.format_element(u))
    return EXIT_OK


def cmd_verify(args) -> int:
    threads = _threads()
    try:
        results = suites.run_suite(args.suite, seed=args.seed, p=args.p, depth=args.depth,
                                   width=args.width, degree=args.degree)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    report = {"suite": args.suite,
              "config": {"p": args.p, "depth": args.depth, "width": args.width, "seed": args.seed,
                         "degree": args.degree, "threads": threads},
              "status": "pass" if ok else "fail",
              "results": [r.to_json() for r in results]}
    _emit(report, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_reduce(args) -> int:
    x = _seq(args.x, args.x_tail)
    y = _seq(args.y, args.y_tail)
    try:
        report = verify_main_theorem_instance(x, y, args.M, args.depth, args.width, args.p)
    except ReductionError as exc:
        raise UsageError(str(exc)) from None
    _emit(report, args.out)
    return EXIT_OK if report["status"] == "pass" else EXIT_FAIL


def cmd_perm(args) -> int:
    if args.op == "compose":
        if len(args.seqs) != 2:
            raise UsageError("compose takes two sequences")
        s, t = (perm.check_partial(_ints(v)) for v in args.seqs)
        _emit({"op": "compose", "s": list(s), "t": list(t), "result": list(perm.partial_compose(s, t))}, args.out)
    elif args.op == "inverse":
        if len(args.seqs) != 1:
            raise UsageError("inverse takes one sequence")
        s = perm.check_partial(_ints(args.seqs[0]))
        _emit({"op": "inverse", "s": list(s), "result": list(perm.partial_inverse(s))}, args.out)
    elif args.op == "subgroups":
        subs = perm.all_subgroups(args.degree)
        _emit({"op": "subgroups", "degree": args.degree, "count": len(subs),
               "groups": [G.to_json() for G in subs]}, args.out)
    elif args.op == "borel":
        rows = suites.borel_table(args.degree, args.k)
        ok = all(r["cond1"] == r["cond2"] for r in rows)
        _emit({"op": "borel", "degree": args.degree, "status": "pass" if ok else "fail", "table": rows}, args.out)
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="procount", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, depth=6, width=8):
        sp.add_argument("--p", type=int, default=3, help="odd prime (default 3)")
        sp.add_argument("--depth", type=int, default=depth)
        sp.add_argument("--width", type=int, default=width)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write JSON here instead of stdout")

    sp = sub.add_parser("tree", help="expand a tree to a depth")
    common(sp, depth=4)
    sp.add_argument("--kind", required=True, choices=["S_star", "S_k", "S_omega", "R", "R_k", "T_x"])
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--x", help="prefix of x, e.g. 1,1,1")
    sp.add_argument("--tail", help="a,b for x(k) = a*k + b beyond the prefix (default 0,0)")
    sp.set_defaults(func=cmd_tree)

    sp = sub.add_parser("group", help="normal form of a group expression")
    sp.add_argument("expr")
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--graph", choices=["free", "matching"], default="free",
                    help="commutation graph for x-generators (default: none commute)")
    sp.set_defaults(func=cmd_group)

    sp = sub.add_parser("verify", help="run an acceptance suite")
    common(sp)
    sp.add_argument("--suite", required=True)
    sp.add_argument("--degree", type=int, default=5)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("reduce", help="check the correspondence for T_x and T_y")
    common(sp)
    sp.add_argument("--x", required=True)
    sp.add_argument("--x-tail")
    sp.add_argument("--y", required=True)
    sp.add_argument("--y-tail")
    sp.add_argument("--M", type=int, help="bound with |x(k) - y(k)| < M; omit for unrelated specs")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("perm", help="partial permutations and the Borel conditions")
    sp.add_argument("op", choices=["compose", "inverse", "subgroups", "borel"])
    sp.add_argument("seqs", nargs="*")
    sp.add_argument("--degree", type=int, default=4)
    sp.add_argument("--k", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_perm)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _check_config(args)
        return args.func(args)
    except UsageError as exc:
        print(f"procount: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"procount: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
