"""Proper binary tree reconstruction from relative-distance queries.

Pick two random leaves ``a, b``; one round of ``closer(a, b, c)`` queries
sorts the rest into leaves nearer ``a``, nearer ``b``, or outside
``lca(a, b)``. The three parts are rebuilt as sibling tasks, ``a``- and
``b``-trees are joined under a node labeled ``lca(a, b)``, and that node is
linked into the outside tree with one more round.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import partial
from typing import Hashable, Sequence

from .errors import OracleInconsistency
from .oracle import Closer, Oracle, QueryLedger, attach_transcript
from .scheduler import RoundScheduler, ask, spawn
from .tree import Clade, LeafTree, RootedTree


@dataclass
class LeafPartition:
    a: Hashable
    b: Hashable
    A: list
    B: list
    R: list

    def check(self, leaves: Sequence) -> bool:
        parts = [self.a, self.b, *self.A, *self.B, *self.R]
        return len(parts) == len(set(parts)) == len(leaves) and set(parts) == set(leaves)


def split_leaves(a, b, leaves: Sequence):
    """One round: classify every other leaf against the pair ``(a, b)``."""
    others = [c for c in leaves if c != a and c != b]
    answers = yield from ask([Closer(a, b, c) for c in others])
    part = LeafPartition(a, b, [], [], [])
    for c, pair in zip(others, answers):
        if pair == (a, c):
            part.A.append(c)
        elif pair == (b, c):
            part.B.append(c)
        elif pair == (a, b):
            part.R.append(c)
        else:
            raise OracleInconsistency(f"closer({a},{b},{c}) answered {pair}")
    return part


def link(v: Clade, tr: Clade, a):
    """Splice the subtree ``v`` (whose label starts with leaf ``a``) into ``tr``.

    Returns the root of the combined tree. One round queries
    ``closer(a, c, d)`` for every internal node labeled ``lca(c, d)``.
    """
    internal = [node for node in LeafTree(tr).preorder() if not node.is_leaf]
    answers = yield from ask([Closer(a, *node.label) for node in internal])
    # outside[id(u)] is True when a attaches above u, i.e. closer(a, c, d) = (c, d).
    outside = {}
    toward = {}
    for node, pair in zip(internal, answers):
        c, d = node.label
        if pair == (c, d):
            outside[id(node)] = True
        elif pair == (a, c):
            outside[id(node)] = False
            toward[id(node)] = 0
        elif pair == (a, d):
            outside[id(node)] = False
            toward[id(node)] = 1
        else:
            raise OracleInconsistency(f"closer({a},{c},{d}) answered {pair}")

    found = []
    for u in internal:
        side = toward.get(id(u))
        if side is None:
            continue
        w = u.children[side]
        if w.is_leaf or outside[id(w)]:
            found.append((u, side))
    if len(found) > 1:
        raise OracleInconsistency(f"link of lca{v.label} matched {len(found)} edges")

    if not found:
        g = tr.any_leaf()
        return Clade.join(v, tr, (a, g))
    u, side = found[0]
    w = u.children[side]
    z = u.label[side]
    x = Clade.join(v, w, (a, z))
    x.parent = u
    u.children[side] = x
    return tr


def _base_case(leaves: list):
    if len(leaves) == 1:
        return Clade(leaf=leaves[0])
    if len(leaves) == 2:
        x, y = leaves
        return Clade.join(Clade(leaf=x), Clade(leaf=y), (x, y))
    (pair,) = yield from ask([Closer(*leaves)])
    x, y = pair
    (z,) = [c for c in leaves if c not in pair]
    cherry = Clade.join(Clade(leaf=x), Clade(leaf=y), (x, y))
    return Clade.join(cherry, Clade(leaf=z), (x, z))


def reconstruct_phylogenetic(leaves: Sequence, rng: random.Random, check: bool = False):
    """Task body rebuilding the tree on ``leaves``; returns the root ``Clade``."""
    leaves = list(leaves)
    if len(leaves) <= 3:
        return (yield from _base_case(leaves))
    a, b = rng.sample(leaves, 2)
    part = yield from split_leaves(a, b, leaves)
    if check:
        assert part.check(leaves), "partition does not cover the leaf set"
    tasks = [
        partial(reconstruct_phylogenetic, part.A + [a], check=check),
        partial(reconstruct_phylogenetic, part.B + [b], check=check),
    ]
    if part.R:
        tasks.append(partial(reconstruct_phylogenetic, part.R, check=check))
    subtrees = yield from spawn(*tasks)
    v = Clade.join(subtrees[0], subtrees[1], (a, b))
    if not part.R:
        return v
    return (yield from link(v, subtrees[2], a))


def reconstruct_relative(
    tree: RootedTree,
    seed: int | str = 0,
    *,
    sequential: bool = False,
    ledger: QueryLedger | None = None,
    audit: bool = False,
    check: bool = False,
) -> tuple[LeafTree, RoundScheduler]:
    """Rebuild ``tree`` from its leaves alone; the scheduler holds the ledger."""
    oracle = Oracle(tree, ledger or QueryLedger(keep_rounds=False), audit=audit)
    sched = RoundScheduler(oracle, seed, sequential)
    leaves = list(tree.leaves)
    with attach_transcript(oracle.ledger):
        (root,) = sched.run([partial(reconstruct_phylogenetic, leaves, check=check)])
    return LeafTree(root), sched
