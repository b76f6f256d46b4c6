"""Random and structured tree instances."""

from __future__ import annotations

import heapq
import random
from collections import Counter

from .errors import InvalidArgument
from .tree import RootedTree


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def pruefer_decode(seq: list[int], n: int) -> list[tuple[int, int]]:
    """Undirected edge list of the labeled tree on ``1..n`` coded by ``seq``."""
    if len(seq) != n - 2:
        raise InvalidArgument(f"sequence length {len(seq)} != n-2 = {n - 2}")
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return edges


def orient(edges: list[tuple[int, int]], n: int, root: int, degree_bound: int | None = None) -> RootedTree:
    adj: list[list[int]] = [[] for _ in range(n + 1)]
    for x, y in edges:
        adj[x].append(y)
        adj[y].append(x)
    parent = {}
    seen = [False] * (n + 1)
    seen[root] = True
    stack = [root]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                parent[w] = v
                stack.append(w)
    return RootedTree(parent, n, degree_bound=degree_bound)


def pruefer_sequence(n: int, d: int, rng: random.Random, max_tries: int = 100_000) -> list[int]:
    """Length n-2 code where every node appears at most d-1 times and some node exactly d-1 times.

    Each slot is drawn uniformly from the nodes that still have room; the
    whole sequence is redrawn if no node reached d-1 occurrences.
    """
    for _ in range(max_tries):
        counts = Counter()
        open_nodes = list(range(1, n + 1))
        where = {v: i for i, v in enumerate(open_nodes)}
        seq = []
        for _ in range(n - 2):
            v = open_nodes[rng.randrange(len(open_nodes))]
            seq.append(v)
            counts[v] += 1
            if counts[v] == d - 1:
                # swap-remove from the open set
                i, last = where.pop(v), open_nodes[-1]
                open_nodes[i] = last
                open_nodes.pop()
                if last != v:
                    where[last] = i
        if n - 2 == 0 or (counts and max(counts.values()) == d - 1):
            return seq
    raise InvalidArgument(f"no sequence with a degree-{d} node after {max_tries} tries")


def gen_pruefer_tree(n: int, d: int, seed=None) -> RootedTree:
    """Random tree with maximum degree exactly ``d``, rooted at a uniform node."""
    if n < 2 or d < 2:
        raise InvalidArgument("need n >= 2 and d >= 2")
    if n > 2 and n - 2 < d - 1:
        raise InvalidArgument(f"n={n} leaves too few code slots for a degree-{d} node")
    rng = _rng(seed)
    seq = pruefer_sequence(n, d, rng)
    edges = pruefer_decode(seq, n)
    root = rng.randint(1, n)
    return orient(edges, n, root, degree_bound=max(d, 2))


def gen_binary_tree(num_leaves: int, seed=None) -> RootedTree:
    """Uniform rooted proper binary tree on leaves ``1..k`` (Remy-style insertion).

    Leaf ``i`` subdivides a uniformly chosen edge, or the slot above the
    current root, with a new internal node. Internal ids follow the leaves.
    """
    if num_leaves < 1:
        raise InvalidArgument("need at least one leaf")
    rng = _rng(seed)
    k = num_leaves
    parent = {}
    root = 1
    nodes = [1]  # every node except the root owns the edge above it; the root owns the root slot
    next_internal = k + 1
    for leaf in range(2, k + 1):
        target = nodes[rng.randrange(len(nodes))]
        mid = next_internal
        next_internal += 1
        if target == root:
            root = mid
        else:
            parent[mid] = parent[target]
        parent[target] = mid
        parent[leaf] = mid
        nodes.append(leaf)
        nodes.append(mid)
    return RootedTree(parent, 2 * k - 1, degree_bound=3)


def gen_spider_tree(n: int, d: int) -> RootedTree:
    """Root 1 with ``d`` chains whose lengths split n-1 as evenly as possible."""
    if d < 1 or n < d + 1:
        raise InvalidArgument(f"spider needs n >= d+1 (n={n}, d={d})")
    q, rem = divmod(n - 1, d)
    parent = {}
    nxt = 2
    for i in range(d):
        prev = 1
        for _ in range(q + (1 if i < rem else 0)):
            parent[nxt] = prev
            prev = nxt
            nxt += 1
    return RootedTree(parent, n, degree_bound=max(2, d))


def gen_chain(n: int) -> RootedTree:
    return RootedTree({v: v - 1 for v in range(2, n + 1)}, n)
