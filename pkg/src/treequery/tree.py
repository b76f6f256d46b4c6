"""Ground-truth rooted trees and the querier's leaf-labeled output trees.

``RootedTree`` is an arborescence over the ids ``1..n``. Structural
queries walk parent chains on purpose: the oracle answers from a separate
interval/RMQ index, so tree-core stays an independent route for auditing it.

``LeafTree`` is the proper binary tree produced by relative-distance
reconstruction. Each internal ``Clade`` carries a label ``(x, y)`` meaning
"lca(x, y)", with ``x`` under the first child and ``y`` under the second.
"""

from __future__ import annotations

from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import InvalidArgument


class RootedTree:
    """Immutable rooted tree over node ids ``1..n``.

    ``parent`` maps every non-root id to its parent. ``children`` may fix
    the child order (Newick round trips need it); otherwise children are
    listed by increasing id. ``degree_bound`` defaults to the actual maximum
    degree (in-degree plus out-degree), floored at 2.
    """

    def __init__(
        self,
        parent: Mapping[int, int],
        n: int | None = None,
        *,
        degree_bound: int | None = None,
        children: Mapping[int, Sequence[int]] | None = None,
        names: Mapping[int, str] | None = None,
    ):
        if n is None:
            n = len(parent) + 1
        if n < 1:
            raise InvalidArgument("a tree needs at least one node")
        self.n = n
        par = [0] * (n + 1)
        for c, p in parent.items():
            if not (1 <= c <= n and 1 <= p <= n):
                raise InvalidArgument(f"edge {p}->{c} outside 1..{n}")
            if c == p:
                raise InvalidArgument(f"self loop at {c}")
            par[c] = p
        roots = [v for v in range(1, n + 1) if par[v] == 0]
        if len(roots) != 1:
            raise InvalidArgument(f"expected exactly one root, found {len(roots)}")
        self.root = roots[0]
        self._parent = par

        if children is None:
            kids: list[list[int]] = [[] for _ in range(n + 1)]
            for v in range(1, n + 1):
                if par[v]:
                    kids[par[v]].append(v)
            self._children = [tuple(k) for k in kids]
        else:
            self._children = [()] * (n + 1)
            for p, cs in children.items():
                self._children[p] = tuple(cs)
            for v in range(1, n + 1):
                for c in self._children[v]:
                    if par[c] != v:
                        raise InvalidArgument(f"child order lists {c} under {v}, parent map disagrees")
            if sum(len(cs) for cs in self._children) != n - 1:
                raise InvalidArgument("child order does not cover every edge")

        # BFS from the root proves the parent relation is an arborescence.
        order = [self.root]
        depth = [0] * (n + 1)
        for v in order:
            for c in self._children[v]:
                depth[c] = depth[v] + 1
                order.append(c)
        if len(order) != n:
            raise InvalidArgument("parent relation contains a cycle")
        self._bfs = order
        self._depth = depth

        self.max_degree = max(self.degree(v) for v in range(1, n + 1))
        if degree_bound is None:
            degree_bound = max(2, self.max_degree)
        if degree_bound < 2:
            raise InvalidArgument("degree bound must be at least 2")
        if self.max_degree > degree_bound:
            raise InvalidArgument(f"node degree {self.max_degree} exceeds bound {degree_bound}")
        self.degree_bound = degree_bound
        self.names: dict[int, str] = dict(names or {})

    # -- basic access ---------------------------------------------------

    def _check(self, *ids: int) -> None:
        for v in ids:
            if not isinstance(v, int) or not 1 <= v <= self.n:
                raise InvalidArgument(f"unknown node id {v!r}")

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    @property
    def parent(self) -> dict[int, int]:
        return {v: self._parent[v] for v in self.nodes if self._parent[v]}

    def parent_of(self, v: int) -> int | None:
        self._check(v)
        return self._parent[v] or None

    def children(self, v: int) -> tuple[int, ...]:
        self._check(v)
        return self._children[v]

    def depth(self, v: int) -> int:
        self._check(v)
        return self._depth[v]

    def degree(self, v: int) -> int:
        return len(self._children[v]) + (1 if self._parent[v] else 0)

    def is_leaf(self, v: int) -> bool:
        self._check(v)
        return not self._children[v]

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in self.nodes if not self._children[v])

    def bfs_order(self) -> list[int]:
        return list(self._bfs)

    def is_proper_binary(self) -> bool:
        return all(len(self._children[v]) in (0, 2) for v in self.nodes)

    # -- structural queries ----------------------------------------------

    def ancestors(self, v: int) -> list[int]:
        """Parent chain from ``v`` up to the root, ``v`` included."""
        self._check(v)
        chain = []
        par = self._parent
        while v:
            chain.append(v)
            v = par[v]
        return chain

    def is_ancestor(self, u: int, v: int) -> bool:
        """True iff ``u`` lies on the parent chain of ``v`` (reflexive)."""
        self._check(u, v)
        par = self._parent
        while v:
            if v == u:
                return True
            v = par[v]
        return False

    def lca(self, u: int, v: int) -> int:
        self._check(u, v)
        on_chain = set(self.ancestors(u))
        par = self._parent
        while v not in on_chain:
            v = par[v]
        return v

    @cached_property
    def _sizes(self) -> list[int]:
        size = [1] * (self.n + 1)
        size[0] = 0
        par = self._parent
        for v in reversed(self._bfs):
            if par[v]:
                size[par[v]] += size[v]
        return size

    def subtree_size(self, s: int) -> int:
        """Number of nodes in the subtree rooted at ``s``, ``s`` included."""
        self._check(s)
        return self._sizes[s]

    def is_splitting_edge(self, s: int) -> bool:
        """Whether ``(parent(s), s)`` cuts off between n/(d+2) and n(d+1)/(d+2) nodes."""
        self._check(s)
        if s == self.root:
            raise InvalidArgument("the root has no parent edge")
        size, n, d = self._sizes[s], self.n, self.degree_bound
        return n <= size * (d + 2) <= n * (d + 1)

    def is_even_edge_separator(self, s: int) -> bool:
        """Whether removing ``(parent(s), s)`` leaves both parts in [n/d, n(d-1)/d]."""
        self._check(s)
        if s == self.root:
            raise InvalidArgument("the root has no parent edge")
        n, d = self.n, self.degree_bound
        inside = self._sizes[s]
        return all(n <= part * d <= n * (d - 1) for part in (inside, n - inside))

    def splitting_edges(self) -> list[int]:
        return [s for s in self.nodes if s != self.root and self.is_splitting_edge(s)]

    # -- conversions ------------------------------------------------------

    def edges(self) -> set[tuple[int, int]]:
        return {(p, c) for c, p in self.parent.items()}

    def leaf_tree(self) -> LeafTree:
        """The proper binary leaf tree whose leaves are this tree's leaf ids."""
        if not self.is_proper_binary():
            raise InvalidArgument("tree is not proper binary")
        clades: dict[int, Clade] = {}
        for v in reversed(self._bfs):
            kids = self._children[v]
            if not kids:
                clades[v] = Clade(leaf=v)
            else:
                left, right = clades[kids[0]], clades[kids[1]]
                clades[v] = Clade.join(left, right, (left.any_leaf(), right.any_leaf()))
        return LeafTree(clades[self.root])

    def __repr__(self) -> str:
        return f"RootedTree(n={self.n}, root={self.root}, d={self.degree_bound})"


def trees_equal_edges(a: RootedTree, b: RootedTree) -> bool:
    return a.n == b.n and a.root == b.root and a._parent == b._parent


def tree_from_edges(edges: Iterable[tuple[int, int]], n: int, degree_bound: int | None = None) -> RootedTree:
    """Build a ``RootedTree`` from ``(parent, child)`` pairs over ``1..n``."""
    parent: dict[int, int] = {}
    for p, c in edges:
        if c in parent and parent[c] != p:
            raise InvalidArgument(f"node {c} given two parents")
        parent[c] = p
    if len(parent) != n - 1:
        raise InvalidArgument(f"{len(parent)} edges for {n} nodes")
    return RootedTree(parent, n, degree_bound=degree_bound)


class Clade:
    """One node of a ``LeafTree``: a named leaf or an lca-labeled internal node."""

    __slots__ = ("leaf", "label", "children", "parent")

    def __init__(self, leaf: Hashable | None = None, label: tuple | None = None):
        self.leaf = leaf
        self.label = label
        self.children: list[Clade] = []
        self.parent: Clade | None = None

    @classmethod
    def join(cls, left: Clade, right: Clade, label: tuple) -> Clade:
        node = cls(label=label)
        node.children = [left, right]
        left.parent = right.parent = node
        return node

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def any_leaf(self) -> Hashable:
        """A leaf below this clade, cheap to find thanks to the labels."""
        return self.leaf if self.is_leaf else self.label[0]

    def __repr__(self) -> str:
        if self.is_leaf:
            return f"Clade({self.leaf!r})"
        return f"Clade(lca{self.label!r})"


class LeafTree:
    """A leaf-labeled binary tree rooted at ``root``."""

    def __init__(self, root: Clade):
        self.root = root

    def preorder(self) -> Iterator[Clade]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def postorder(self) -> list[Clade]:
        out = list(self.preorder())
        out.reverse()
        return out

    def leaves(self) -> list[Hashable]:
        return [c.leaf for c in self.preorder() if c.is_leaf]

    def internal_nodes(self) -> list[Clade]:
        return [c for c in self.preorder() if not c.is_leaf]

    def is_proper_binary(self) -> bool:
        return all(len(c.children) in (0, 2) for c in self.preorder())

    def check_labels(self) -> bool:
        """Every label ``(x, y)`` names two leaves on opposite sides of its node."""
        below: dict[int, set] = {}
        for c in self.postorder():
            if c.is_leaf:
                below[id(c)] = {c.leaf}
                continue
            sides = [below[id(k)] for k in c.children]
            if c.label is None or len(c.label) != 2:
                return False
            x, y = c.label
            if len(sides) != 2 or x not in sides[0] or y not in sides[1]:
                return False
            below[id(c)] = sides[0] | sides[1]
            for k in c.children:
                del below[id(k)]
        return True

    def canonical(self) -> str:
        """Shape string invariant under child swaps.

        Children are ordered by their smallest leaf name, which is enough for
        binary trees with distinct leaf names.
        """
        if not self.is_proper_binary():
            raise InvalidArgument("leaf isomorphism needs proper binary trees")
        form: dict[int, tuple] = {}
        for c in self.postorder():
            if c.is_leaf:
                form[id(c)] = (c.leaf, repr(c.leaf))
                continue
            parts = sorted((form.pop(id(k)) for k in c.children), key=lambda p: p[0])
            form[id(c)] = (parts[0][0], "(" + ",".join(p[1] for p in parts) + ")")
        return form[id(self.root)][1]

    def to_newick(self, names: Mapping | None = None) -> str:
        """Newick with internal labels, e.g. ``((a,b)lca_a_b,c)lca_a_c;``."""
        names = names or {}

        def name(leaf):
            return str(names.get(leaf, leaf))

        text: dict[int, str] = {}
        for c in self.postorder():
            if c.is_leaf:
                text[id(c)] = name(c.leaf)
            else:
                inner = ",".join(text.pop(id(k)) for k in c.children)
                x, y = c.label
                text[id(c)] = f"({inner})lca_{name(x)}_{name(y)}"
        return text[id(self.root)] + ";"

    def __len__(self) -> int:
        return sum(1 for _ in self.preorder())


def leaf_isomorphic(a: LeafTree, b: LeafTree) -> bool:
    return a.canonical() == b.canonical()
