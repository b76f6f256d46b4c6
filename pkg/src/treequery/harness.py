"""Experiment runner: single runs, parameter sweeps, CSV rows and SVG plots."""

from __future__ import annotations

import ast
import csv
import hashlib
import io
import math
import operator
import time
from dataclasses import dataclass
from itertools import groupby
from typing import Iterable, Sequence

from .errors import InvalidArgument
from .generate import gen_binary_tree, gen_chain, gen_pruefer_tree, gen_spider_tree
from .recon_path import SplitConstants, reconstruct_path, theory_c2
from .recon_relative import reconstruct_relative
from .tree import LeafTree, RootedTree, leaf_isomorphic, trees_equal_edges

ALGORITHMS = ("rel-dist", "path", "path-bruteforce", "rel-dist-seq", "path-seq")
CSV_FIELDS = ["algorithm", "n", "d", "seed", "c1", "c2", "g", "queries", "rounds", "wall_ms", "correct"]
KINDS = ("pruefer", "binary", "spider", "chain")


@dataclass
class RunRecord:
    algorithm: str
    n: int
    d: int
    seed: int | str
    c1: float | None
    c2: float | None
    g: int | None
    queries: float
    rounds: float
    wall_ms: float
    correct: bool | None

    def row(self) -> dict:
        def fmt(x):
            if x is None:
                return ""
            if isinstance(x, bool):
                return "true" if x else "false"
            if isinstance(x, float):
                return f"{x:.6g}" if not x.is_integer() else str(int(x))
            return str(x)

        out = {k: fmt(getattr(self, k)) for k in CSV_FIELDS}
        out["wall_ms"] = f"{self.wall_ms:.3f}"
        return out


# -- instances ----------------------------------------------------------------


def make_instance(kind: str, n: int, d: int = 3, seed=0) -> RootedTree:
    """``binary`` reads ``n`` as the number of leaves."""
    if kind == "pruefer":
        return gen_pruefer_tree(n, d, seed)
    if kind == "binary":
        return gen_binary_tree(n, seed)
    if kind == "spider":
        return gen_spider_tree(n, d)
    if kind == "chain":
        return gen_chain(n)
    raise InvalidArgument(f"unknown instance kind {kind!r} (choose from {', '.join(KINDS)})")


def parse_generator(text: str) -> tuple[str, dict[str, int]]:
    """``pruefer:n=2000,d=5`` -> ``("pruefer", {"n": 2000, "d": 5})``."""
    kind, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise InvalidArgument(f"bad generator parameter {item!r}; expected key=value")
        try:
            params[key.strip()] = int(value)
        except ValueError:
            raise InvalidArgument(f"generator parameter {key}={value!r} is not an integer") from None
    if kind not in KINDS:
        raise InvalidArgument(f"unknown instance kind {kind!r}")
    if "n" not in params:
        raise InvalidArgument("generator string needs n=")
    unknown = set(params) - {"n", "d"}
    if unknown:
        raise InvalidArgument(f"unknown generator parameters {sorted(unknown)}")
    return kind, params


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}


def c2_value(token: str, d: int, n: int) -> float:
    """A C2 setting: a number, an expression in ``d`` such as ``(d+2)^2``, or ``theory``."""
    token = token.strip()
    if token == "theory":
        return theory_c2(d, n)
    try:
        tree = ast.parse(token.replace("^", "**"), mode="eval")
    except SyntaxError:
        raise InvalidArgument(f"cannot read C2 value {token!r}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "d":
            return d
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise InvalidArgument(f"cannot read C2 value {token!r}")

    value = float(ev(tree))
    if value <= 0:
        raise InvalidArgument("C2 must be positive")
    return value


# -- single runs --------------------------------------------------------------


def named_leaf_tree(t: RootedTree) -> LeafTree:
    """``t.leaf_tree()`` with leaves renamed through ``t.names`` when present."""
    lt = t.leaf_tree()
    if not t.names:
        return lt
    rename = lambda leaf: t.names.get(leaf, leaf)  # noqa: E731
    for c in lt.preorder():
        if c.is_leaf:
            c.leaf = rename(c.leaf)
        else:
            c.label = tuple(map(rename, c.label))
    return lt


def run_once(
    algorithm: str,
    tree: RootedTree,
    seed: int | str = 0,
    c1: float = 2.0,
    c2: float | None = None,
    g: int = 32,
    d: int | None = None,
) -> RunRecord:
    """Reconstruct ``tree`` once and check the result against it.

    ``d`` is the degree bound handed to the path algorithm (default: the
    tree's own bound). Relative-distance runs report the leaf count as n.
    """
    if algorithm not in ALGORITHMS:
        raise InvalidArgument(f"unknown algorithm {algorithm!r}")
    sequential = algorithm.endswith("-seq")
    start = time.perf_counter()
    if algorithm.startswith("rel-dist"):
        if not tree.is_proper_binary():
            raise InvalidArgument(
                f"relative-distance reconstruction needs a proper binary tree (some node has {max(map(len, tree._children))} children)"
            )
        out, sched = reconstruct_relative(tree, seed, sequential=sequential)
        wall = (time.perf_counter() - start) * 1000
        correct = leaf_isomorphic(out, tree.leaf_tree())
        return RunRecord(
            algorithm, len(tree.leaves), tree.degree_bound, seed, None, None, None,
            sched.ledger.total_queries, sched.ledger.total_rounds, wall, correct,
        )
    d = d or tree.degree_bound
    if algorithm == "path-bruteforce":
        out, sched = reconstruct_path(tree, seed, brute_force=True)
        k = None
    else:
        k = SplitConstants(d=d, c1=c1, c2=c2, g=g)
        out, sched = reconstruct_path(tree, seed, k, sequential=sequential)
    wall = (time.perf_counter() - start) * 1000
    return RunRecord(
        algorithm, tree.n, d, seed,
        k.c1 if k else None, k.c2_value if k else None, k.g if k else None,
        sched.ledger.total_queries, sched.ledger.total_rounds, wall,
        trees_equal_edges(out, tree),
    )


def run_trials(
    algorithm: str,
    kind: str,
    n: int,
    d: int = 3,
    trials: int = 1,
    seed: int = 0,
    c2: float | str | None = None,
    **consts,
) -> list[RunRecord]:
    """One fresh instance per trial; trial ``i`` uses seed ``seed + i`` for both tree and run.

    A string ``c2`` is read by ``c2_value`` against this point's d and n.
    """
    if isinstance(c2, str):
        c2 = c2_value(c2, d, n)
    consts["c2"] = c2
    records = []
    for i in range(trials):
        tree = make_instance(kind, n, d, seed + i)
        records.append(run_once(algorithm, tree, seed + i, **consts))
    return records


# -- aggregation and output -----------------------------------------------------


def _point(r: RunRecord) -> tuple:
    return (r.algorithm, r.n, r.d, r.c1 or 0, r.c2 or 0, r.g or 0)


def _seed_key(seed):
    return (0, seed, "") if isinstance(seed, int) else (1, 0, str(seed))


def average(records: Sequence[RunRecord]) -> RunRecord:
    first = records[0]
    k = len(records)
    flags = [r.correct for r in records]
    return RunRecord(
        first.algorithm, first.n, first.d, "AVG", first.c1, first.c2, first.g,
        sum(r.queries for r in records) / k,
        sum(r.rounds for r in records) / k,
        sum(r.wall_ms for r in records) / k,
        None if None in flags else all(flags),
    )


def with_averages(records: Iterable[RunRecord]) -> list[RunRecord]:
    """Trial rows sorted by (point, seed), each point followed by its AVG row."""
    out = []
    ordered = sorted(records, key=lambda r: (_point(r), _seed_key(r.seed)))
    for _, grp in groupby(ordered, key=_point):
        grp = list(grp)
        out.extend(grp)
        out.append(average(grp))
    return out


def write_csv(records: Iterable[RunRecord], stream, header: bool = True) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_FIELDS, lineterminator="\n")
    if header:
        writer.writeheader()
    for r in records:
        writer.writerow(r.row())


def csv_text(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def csv_digest(text: str) -> str:
    """Hash of a CSV document with the wall-clock column blanked out."""
    rows = list(csv.reader(io.StringIO(text)))
    if rows and "wall_ms" in rows[0]:
        col = rows[0].index("wall_ms")
        for row in rows[1:]:
            if len(row) > col:
                row[col] = ""
    return hashlib.sha256("\n".join(",".join(r) for r in rows).encode()).hexdigest()


def bench(
    algorithm: str,
    kind: str,
    axis: str,
    values: Sequence[str],
    n: int = 1000,
    d: int = 5,
    trials: int = 3,
    seed: int = 0,
    c1: float = 2.0,
    c2: float | str | None = None,
    g: int = 32,
) -> list[RunRecord]:
    """Sweep one of ``n``, ``d`` or ``c2`` with the others fixed.

    C2 values (swept or fixed) may be expressions in ``d`` or ``theory``.
    """
    if axis not in ("n", "d", "c2"):
        raise InvalidArgument(f"cannot sweep {axis!r}; choose n, d or c2")
    records = []
    for token in values:
        pn, pd, pc2 = n, d, c2
        if axis == "n":
            pn = int(token)
        elif axis == "d":
            pd = int(token)
        else:
            pc2 = str(token)
        records.extend(run_trials(algorithm, kind, pn, pd, trials, seed, c1=c1, c2=pc2, g=g))
    return with_averages(records)


# -- plotting -------------------------------------------------------------------

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        ticks = [10.0**e * m for e in range(a, b + 1) for m in (1, 2, 5)]
        return [t for t in ticks if lo <= t <= hi] or [lo, hi]
    if hi == lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / 4))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (step * m) <= 6:
            step *= m
            break
    t = math.ceil(lo / step) * step
    out = []
    while t <= hi + 1e-9 * step:
        out.append(t)
        t += step
    return out


def _fmt(x: float) -> str:
    if x >= 10000:
        return f"{x:.0e}".replace("e+0", "e")
    return f"{x:g}"


def svg_plot(records: Sequence[RunRecord], axis: str) -> str:
    """Two panels, rounds and queries against the swept axis, one line per algorithm.

    The x axis is logarithmic when the swept values span a factor of 8 or more.
    """
    avg = [r for r in records if r.seed == "AVG"] or list(records)
    if not avg:
        raise InvalidArgument("nothing to plot")
    xs_all = [float(getattr(r, axis)) for r in avg]
    lo, hi = min(xs_all), max(xs_all)
    logx = lo > 0 and hi / lo >= 8
    width, height, pad = 420, 300, 56
    algs = sorted({r.algorithm for r in avg})
    panels = []
    for p, (metric, title) in enumerate((("rounds", "rounds R"), ("queries", "queries Q"))):
        ys = [float(getattr(r, metric)) for r in avg]
        ylo, yhi = 0.0, max(ys) * 1.05 or 1.0
        ox = p * width

        def sx(x):
            if hi == lo:
                return ox + pad + (width - 2 * pad) / 2
            if logx:
                frac = (math.log(x) - math.log(lo)) / (math.log(hi) - math.log(lo))
            else:
                frac = (x - lo) / (hi - lo)
            return ox + pad + frac * (width - 2 * pad)

        def sy(y):
            return height - pad - (y - ylo) / (yhi - ylo) * (height - 2 * pad)

        el = [
            f'<rect x="{ox + pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
            'fill="none" stroke="#333"/>',
            f'<text x="{ox + width / 2}" y="{pad - 18}" text-anchor="middle" font-size="14">{title}</text>',
            f'<text x="{ox + width / 2}" y="{height - 14}" text-anchor="middle" font-size="12">'
            f'{axis}{" (log)" if logx else ""}</text>',
        ]
        for t in _ticks(lo, hi, logx):
            el.append(
                f'<text x="{sx(t):.1f}" y="{height - pad + 16}" text-anchor="middle" font-size="10">{_fmt(t)}</text>'
            )
        for t in _ticks(ylo, yhi, False):
            el.append(
                f'<text x="{ox + pad - 6}" y="{sy(t) + 3:.1f}" text-anchor="end" font-size="10">{_fmt(t)}</text>'
            )
        for i, alg in enumerate(algs):
            pts = sorted((float(getattr(r, axis)), float(getattr(r, metric))) for r in avg if r.algorithm == alg)
            color = _COLORS[i % len(_COLORS)]
            coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in pts)
            el.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            el.extend(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="{color}"/>' for x, y in pts)
            if p == 0:
                el.append(
                    f'<text x="{ox + pad + 8}" y="{pad + 16 + 14 * i}" font-size="11" fill="{color}">{alg}</text>'
                )
        panels.append("\n".join(el))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{2 * width}" height="{height}" '
        f'viewBox="0 0 {2 * width} {height}" font-family="sans-serif">\n'
        '<rect width="100%" height="100%" fill="white"/>\n' + "\n".join(panels) + "\n</svg>\n"
    )
