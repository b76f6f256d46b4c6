"""Rooted tree reconstruction from path queries.

The root comes from doubly-logarithmic max-finding over the ancestors of
an arbitrary node. The rest is divide and conquer: sample a node ``v``,
look for a splitting edge on the root-to-``v`` path by estimating
descendant counts from small random samples, cut there and recurse on both
sides as sibling tasks. Below ``g`` nodes a one-round quadratic brute force
takes over.

Every routine here is a scheduler task body (a generator). Use
``reconstruct_path`` to run the whole pipeline against a hidden tree.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import partial
from typing import Sequence

from .errors import InvalidArgument, OracleInconsistency
from .oracle import Oracle, Path, QueryLedger, attach_transcript
from .scheduler import RoundScheduler, ask, spawn
from .tree import RootedTree, tree_from_edges

Edge = tuple[int, int]


def theory_c2(d: int, n: int) -> float:
    """Largest of the four Chernoff constants; makes each estimate fail w.p. < 1/n^2."""
    n = max(n, 3)
    return 6 * (d + 2) ** 2 * (d + 1) ** 2 * math.log(2 * n) / math.log(n)


@dataclass(frozen=True)
class SplitConstants:
    """Sampling constants: ``m = ceil(c1*sqrt|V|)``, ``K = ceil(c2*ln|V|)``.

    ``c2=None`` means the default ``d + 2``; ``g`` is the brute-force cutoff.
    ``reuse_verify=False`` and ``eager_parent=False`` restore the literal
    round structure (one extra round each per recursion level).
    """

    d: int
    c1: float = 2.0
    c2: float | None = None
    g: int = 32
    # Split V with the answers verification already collected instead of
    # asking the same path(w, z) batch again.
    reuse_verify: bool = True
    # Ask find-parent's ancestor batch in the same round as the verification
    # count; costs |V| wasted queries whenever verification rejects.
    eager_parent: bool = True

    def __post_init__(self):
        if self.d < 2:
            raise InvalidArgument("degree bound must be at least 2")
        if self.c1 <= 0 or (self.c2 is not None and self.c2 <= 0):
            raise InvalidArgument("c1 and c2 must be positive")
        if self.g < 1:
            raise InvalidArgument("g must be at least 1")

    @property
    def c2_value(self) -> float:
        return self.d + 2 if self.c2 is None else self.c2

    def sample_size(self, n: int) -> int:
        return max(2, math.ceil(self.c1 * math.sqrt(n)))

    def estimate_size(self, n: int) -> int:
        # capped at n so tiny subproblems never sample more than they hold
        return min(n, max(1, math.ceil(self.c2_value * math.log(n))))


@dataclass
class PathTrace:
    """Optional instrumentation filled in during a run (soundness tests read it)."""

    split_calls: list[tuple[int, Edge | None]] = field(default_factory=list)
    verified: list[tuple[int, int, int]] = field(default_factory=list)
    parents: list[tuple[int, int | None]] = field(default_factory=list)
    partitions: list[tuple[int, frozenset, frozenset]] = field(default_factory=list)


class SplitEdge(tuple):
    """``(parent, child)`` that also remembers which nodes lie below ``child``."""

    below: list[int]

    def __new__(cls, parent: int, child: int, below: list[int]):
        edge = super().__new__(cls, (parent, child))
        edge.below = below
        return edge


def _pairs(k: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(k) for j in range(i + 1, k)]


def sort_by_ancestry(nodes: Sequence[int]):
    """Order distinct nodes of one root path from top to bottom, in one round."""
    nodes = list(dict.fromkeys(nodes))
    pairs = _pairs(len(nodes))
    answers = yield from ask([Path(nodes[i], nodes[j]) for i, j in pairs])
    below = [0] * len(nodes)
    for (i, j), a in zip(pairs, answers):
        below[i if a else j] += 1
    if sorted(below) != list(range(len(nodes))):
        raise OracleInconsistency("nodes are not totally ordered by ancestry")
    order = sorted(range(len(nodes)), key=lambda i: -below[i])
    return [nodes[i] for i in order]


def max_finding(candidates: Sequence[int], budget: int | None = None):
    """Topmost node of a set totally ordered by ancestry.

    Each round splits the k survivors into groups of ``max(2, budget // k)``
    and compares all pairs inside every group, so a round never asks more
    than ``budget / 2`` queries and k shrinks roughly to ``k**2 / budget``.
    """
    cands = list(candidates)
    if not cands:
        raise InvalidArgument("max_finding needs at least one node")
    n = budget or len(cands)
    while len(cands) > 1:
        k = len(cands)
        size = max(2, n // k)
        groups = [cands[i : i + size] for i in range(0, k, size)]
        queries = []
        for grp in groups:
            queries.extend(Path(grp[i], grp[j]) for i, j in _pairs(len(grp)))
        answers = yield from ask(queries)
        pos = 0
        survivors = []
        for grp in groups:
            wins = [0] * len(grp)
            for i, j in _pairs(len(grp)):
                wins[i if answers[pos] else j] += 1
                pos += 1
            top = [x for x, w in zip(grp, wins) if w == len(grp) - 1]
            if len(top) != 1:
                raise OracleInconsistency("group has no unique topmost node")
            survivors.append(top[0])
        cands = survivors
    return cands[0]


def find_root(nodes: Sequence[int], rng: random.Random, v: int | None = None):
    """The root: max-finding over the ancestors of an arbitrary node ``v``."""
    nodes = list(nodes)
    if v is None:
        v = rng.choice(nodes)
    others = [u for u in nodes if u != v]
    answers = yield from ask([Path(u, v) for u in others])
    above = [u for u, a in zip(others, answers) if a]
    if not above:
        return v
    return (yield from max_finding(above, budget=len(nodes)))


def brute_force_reconstruct(nodes: Sequence[int], root: int | None = None):
    """All ordered pairs in one round; each parent is the deepest proper ancestor."""
    nodes = list(nodes)
    if len(nodes) <= 1:
        return set()
    pairs = [(u, v) for u in nodes for v in nodes if u != v]
    answers = yield from ask([Path(u, v) for u, v in pairs])
    above: dict[int, list[int]] = {v: [] for v in nodes}
    for (u, v), a in zip(pairs, answers):
        if a:
            above[v].append(u)
    tops = [v for v in nodes if not above[v]]
    if len(tops) != 1 or (root is not None and tops[0] != root):
        raise OracleInconsistency(f"brute force found roots {tops}, expected {root}")
    depth = {v: len(above[v]) for v in nodes}
    edges = set()
    for v in nodes:
        if above[v]:
            edges.add((max(above[v], key=depth.__getitem__), v))
    return edges


def find_parent(
    s: int,
    nodes: Sequence[int],
    k: SplitConstants,
    rng: random.Random,
    trace: PathTrace | None = None,
    ancestors: list[int] | None = None,
):
    """Parent of ``s`` via two rounds of sample-and-trim, or None on a bad sample.

    Never returns a wrong node: the answer is always the lowest element of a
    set that still contains every ancestor below the lowest sample.
    ``ancestors`` skips the first round when the caller already knows them.
    """
    if ancestors is None:
        others = [z for z in nodes if z != s]
        answers = yield from ask([Path(z, s) for z in others])
        ancestors = [z for z, a in zip(others, answers) if a]
    path = list(ancestors)
    m = k.sample_size(len(nodes))
    for _ in range(2):
        if len(path) <= m:
            break
        sample = [rng.choice(path) for _ in range(m)]
        lowest = (yield from sort_by_ancestry(sample))[-1]
        answers = yield from ask([Path(lowest, u) for u in path])
        path = [u for u, a in zip(path, answers) if a]
    parent = None
    if path and len(path) <= m:
        parent = (yield from sort_by_ancestry(path))[-1]
    if trace is not None:
        trace.parents.append((s, parent))
    return parent


def verify_splitting_edge(s: int, nodes: Sequence[int], k: SplitConstants, rng: random.Random, trace=None):
    nodes = list(nodes)
    n, d = len(nodes), k.d
    queries = [Path(s, z) for z in nodes]
    others = [z for z in nodes if z != s]
    if k.eager_parent:
        queries += [Path(z, s) for z in others]
    answers = yield from ask(queries)
    size = sum(answers[:n])
    if not (n <= size * (d + 2) <= n * (d + 1)):
        return None
    ancestors = [z for z, a in zip(others, answers[n:]) if a] if k.eager_parent else None
    parent = yield from find_parent(s, nodes, k, rng, trace, ancestors)
    if parent is None:
        return None
    if trace is not None:
        trace.verified.append((s, n, size))
    return SplitEdge(parent, s, [z for z, a in zip(nodes, answers[:n]) if a])


def _estimate(group: Sequence[int], nodes: Sequence[int], K: int, rng: random.Random):
    """count(s, X_s) for every s, each X_s being K draws from ``nodes`` with replacement."""
    queries = []
    for s in group:
        queries.extend(Path(s, x) for x in rng.choices(nodes, k=K))
    answers = yield from ask(queries)
    return [sum(answers[i * K : (i + 1) * K]) for i in range(len(group))]


def _most_balanced(group, counts, K, low, high, root):
    """The candidate whose estimate is nearest K/2 (first one on ties), if any."""
    best = None
    for s, c in zip(group, counts):
        if s == root or low(c) or high(c):
            continue
        if best is None or abs(2 * c - K) < abs(2 * best[1] - K):
            best = (s, c)
    return None if best is None else best[0]


def find_splitting_edge(
    v: int,
    path: Sequence[int],
    nodes: Sequence[int],
    root: int,
    k: SplitConstants,
    rng: random.Random,
    trace: PathTrace | None = None,
):
    """A splitting edge on the root-to-``v`` path ``path``, or None."""
    nodes = list(nodes)
    path = list(path)
    n, d = len(nodes), k.d
    m, K = k.sample_size(n), k.estimate_size(n)

    def low(c):  # c < K/(d+1)
        return c * (d + 1) < K

    def high(c):  # c > Kd/(d+1)
        return c * (d + 1) > K * d

    if len(path) * K > n:
        sample = list(dict.fromkeys([rng.choice(path) for _ in range(m)] + [v, root]))
        counts = yield from _estimate(sample, nodes, K, rng)
        if all(map(low, counts)) or all(map(high, counts)):
            return None
        pick = _most_balanced(sample, counts, K, low, high, root)
        if pick is not None:
            return (yield from verify_splitting_edge(pick, nodes, k, rng, trace))
        est = dict(zip(sample, counts))
        order = yield from sort_by_ancestry(sample)
        bracket = next(
            ((w, z) for w, z in zip(order, order[1:]) if high(est[w]) and low(est[z])),
            None,
        )
        if bracket is None:
            return None
        w, z = bracket
        answers = yield from ask([Path(w, y) for y in path] + [Path(y, z) for y in path])
        L = len(path)
        path = [y for i, y in enumerate(path) if answers[i] and answers[L + i]]

    if len(path) * K > n:
        return None
    counts = yield from _estimate(path, nodes, K, rng)
    pick = _most_balanced(path, counts, K, low, high, root)
    if pick is not None:
        return (yield from verify_splitting_edge(pick, nodes, k, rng, trace))
    return None


def reconstruct_rooted_tree(
    nodes: Sequence[int],
    root: int,
    k: SplitConstants,
    rng: random.Random,
    trace: PathTrace | None = None,
    max_attempts: int = 10_000,
):
    """Edge set of the subtree spanned by ``nodes`` and rooted at ``root``."""
    nodes = list(nodes)
    if len(nodes) <= k.g:
        return (yield from brute_force_reconstruct(nodes, root))
    for _ in range(max_attempts):
        v = rng.choice(nodes)
        answers = yield from ask([Path(z, v) for z in nodes])
        path = [z for z, a in zip(nodes, answers) if a]
        edge = yield from find_splitting_edge(v, path, nodes, root, k, rng, trace)
        if trace is not None:
            trace.split_calls.append((len(nodes), edge))
        if edge is None:
            continue
        u, w = edge
        if k.reuse_verify and isinstance(edge, SplitEdge):
            members = set(edge.below)
            inside = [z for z in nodes if z in members]
            rest = [z for z in nodes if z not in members]
        else:
            answers = yield from ask([Path(w, z) for z in nodes])
            inside = [z for z, a in zip(nodes, answers) if a]
            rest = [z for z, a in zip(nodes, answers) if not a]
        if u not in rest or w not in inside or root not in rest:
            raise OracleInconsistency(f"split at ({u},{w}) does not separate the subtree")
        if trace is not None:
            trace.partitions.append((w, frozenset(inside), frozenset(rest)))
        below, above = yield from spawn(
            partial(reconstruct_rooted_tree, inside, w, k, trace=trace, max_attempts=max_attempts),
            partial(reconstruct_rooted_tree, rest, root, k, trace=trace, max_attempts=max_attempts),
        )
        return {(u, w)} | below | above
    raise OracleInconsistency(f"no splitting edge found in {max_attempts} attempts on {len(nodes)} nodes")


def _pipeline(nodes: list[int], k: SplitConstants, trace: PathTrace | None, rng: random.Random):
    root = yield from find_root(nodes, rng)
    edges = yield from reconstruct_rooted_tree(nodes, root, k, rng, trace)
    return root, edges


def _brute_pipeline(nodes: list[int], rng: random.Random):
    edges = yield from brute_force_reconstruct(nodes)
    return None, edges


def reconstruct_path(
    tree: RootedTree,
    seed: int | str = 0,
    k: SplitConstants | None = None,
    *,
    sequential: bool = False,
    brute_force: bool = False,
    ledger: QueryLedger | None = None,
    audit: bool = False,
    trace: PathTrace | None = None,
) -> tuple[RootedTree, RoundScheduler]:
    """Recover ``tree`` knowing only its node ids and degree bound.

    Root finding and reconstruction share one ledger, so Q and R cover both.
    """
    k = k or SplitConstants(d=tree.degree_bound)
    oracle = Oracle(tree, ledger or QueryLedger(keep_rounds=False), audit=audit)
    sched = RoundScheduler(oracle, seed, sequential)
    nodes = list(tree.nodes)
    task = partial(_brute_pipeline, nodes) if brute_force else partial(_pipeline, nodes, k, trace)
    with attach_transcript(oracle.ledger):
        ((_, edges),) = sched.run([task])
    return tree_from_edges(edges, tree.n), sched
