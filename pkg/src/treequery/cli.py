"""``treequery`` command line: gen | run | bench | verify."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path as FilePath

from . import harness
from .errors import InvalidArgument
from .newick import read_tree, write_newick, write_parent_array
from .tree import leaf_isomorphic, trees_equal_edges


def _default_seed() -> int:
    raw = os.environ.get("TREEQUERY_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"TREEQUERY_SEED must be an integer, got {raw!r}") from None


def _c2_token(args) -> str | None:
    if args.c2 is not None and args.c2_mult is not None:
        raise InvalidArgument("give at most one of --c2 and --c2-mult")
    if args.c2_mult is not None:
        return f"{args.c2_mult}*(d+2)"
    return args.c2


def _add_constants(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c1", type=float, default=2.0, help="sample size factor, m = c1*sqrt(|V|)")
    p.add_argument("--c2", help="estimate size factor, K = c2*ln|V|; a number, an expression in d, or 'theory'")
    p.add_argument("--c2-mult", type=float, help="set c2 = M*(d+2)")
    p.add_argument("--g", type=int, default=32, help="brute-force cutoff")


def cmd_gen(args) -> int:
    tree = harness.make_instance(args.kind, args.n, args.d, args.seed)
    fmt = args.format or ("parent" if args.kind in ("spider", "chain") else "newick")
    text = write_newick(tree) + "\n" if fmt == "newick" else write_parent_array(tree)
    if args.out:
        FilePath(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    dest = args.out or "stdout"
    print(
        f"{args.kind}: n={tree.n} leaves={len(tree.leaves)} root={tree.root} "
        f"max_degree={tree.max_degree} -> {dest} ({fmt})",
        file=sys.stderr if not args.out else sys.stdout,
    )
    return 0


def _emit(records, csv_path: str | None) -> None:
    if csv_path:
        path = FilePath(csv_path)
        fresh = not path.exists() or path.stat().st_size == 0
        with path.open("a", newline="") as fh:
            harness.write_csv(records, fh, header=fresh)
    else:
        harness.write_csv(records, sys.stdout)


def cmd_run(args) -> int:
    alg = args.alg
    if args.seq and not alg.endswith("-seq"):
        if alg == "path-bruteforce":
            raise InvalidArgument("path-bruteforce has no sequential variant")
        alg += "-seq"
    c2 = _c2_token(args)
    consts = dict(c1=args.c1, g=args.g)
    if bool(args.tree) == bool(args.random):
        raise InvalidArgument("give exactly one of --tree and --random")
    records = []
    failures = 0
    if args.random:
        kind, params = harness.parse_generator(args.random)
        n, d = params["n"], params.get("d", args.d or 3)
        records = harness.run_trials(alg, kind, n, d, args.trials, args.seed, c2=c2, **consts)
    else:
        tree = read_tree(args.tree)
        d = args.d or tree.degree_bound
        value = harness.c2_value(c2, d, tree.n) if c2 else None
        for i in range(args.trials):
            try:
                records.append(harness.run_once(alg, tree, args.seed + i, c2=value, d=args.d, **consts))
            except InvalidArgument as exc:
                print(f"{args.tree}: {exc}", file=sys.stderr)
                failures += 1
                break
    _emit(records, args.csv)
    bad = [r for r in records if r.correct is False]
    for r in bad:
        print(f"incorrect reconstruction: {r.algorithm} n={r.n} seed={r.seed}", file=sys.stderr)
    return 1 if bad or failures else 0


def cmd_bench(args) -> int:
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise InvalidArgument("--values needs at least one entry")
    c2 = _c2_token(args)
    records = []
    for alg in args.alg.split(","):
        kind = args.kind or ("binary" if alg.startswith("rel-dist") else "pruefer")
        point = harness.bench(
            alg, kind, args.sweep, values, n=args.n, d=args.d, trials=args.trials,
            seed=args.seed, c1=args.c1, c2=c2, g=args.g,
        )
        records.extend(point)
    _emit(records, args.csv)
    if args.plot:
        FilePath(args.plot).write_text(harness.svg_plot(records, args.sweep))
    bad = [r for r in records if r.correct is False and r.seed != "AVG"]
    for r in bad:
        print(f"incorrect reconstruction: {r.algorithm} n={r.n} d={r.d} seed={r.seed}", file=sys.stderr)
    return 1 if bad else 0


def cmd_verify(args) -> int:
    a, b = read_tree(args.a), read_tree(args.b)
    if args.mode == "edges":
        same = trees_equal_edges(a, b)
    else:
        same = leaf_isomorphic(harness.named_leaf_tree(a), harness.named_leaf_tree(b))
    print("equal" if same else "different")
    return 0 if same else 1


def build_parser() -> argparse.ArgumentParser:
    seed = _default_seed()
    parser = argparse.ArgumentParser(prog="treequery", description="Tree reconstruction from batched oracle queries.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--kind", choices=harness.KINDS, required=True)
    p.add_argument("--n", type=int, required=True, help="node count (leaf count for binary)")
    p.add_argument("--d", type=int, default=3, help="degree (pruefer) or number of legs (spider)")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out", help="output file; stdout when omitted")
    p.add_argument("--format", choices=("newick", "parent"))
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="reconstruct instances and check them")
    p.add_argument("--alg", choices=harness.ALGORITHMS, default="path")
    p.add_argument("--tree", help="Newick or parent-array file")
    p.add_argument("--random", help="generator, e.g. pruefer:n=2000,d=5")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--d", type=int, help="degree bound given to the path algorithm")
    p.add_argument("--seq", action="store_true", help="one query per round")
    p.add_argument("--csv", help="append rows to this file instead of printing them")
    _add_constants(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="sweep n, d or c2 and write CSV/SVG")
    p.add_argument("--alg", default="path", help="comma-separated algorithms")
    p.add_argument("--kind", choices=harness.KINDS)
    p.add_argument("--sweep", choices=("n", "d", "c2"), required=True)
    p.add_argument("--values", required=True, help="comma-separated values of the swept axis")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--csv")
    p.add_argument("--plot", help="SVG output file")
    _add_constants(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="compare two tree files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--mode", choices=("edges", "leaf-iso"), default="edges")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidArgument, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
