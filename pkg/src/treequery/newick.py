"""Newick and parent-array text formats.

Parsing assigns dense ids: leaves first in order of appearance, then
internal nodes in postorder. When every node carries an integer label and
the labels are exactly ``1..n`` they are used as ids instead, so a tree
written with ``write_newick`` parses back to the same ids. Original labels
go to ``RootedTree.names``.
"""

from __future__ import annotations

import re
from pathlib import Path as FilePath

from .errors import InvalidArgument, NewickError
from .tree import RootedTree

_SPECIAL = set("()[]':;,") | set(" \t\r\n")
_PLAIN = re.compile(r"[^()\[\]':;,\s]+")


class _Node:
    __slots__ = ("label", "children", "start")

    def __init__(self, start: int):
        self.label: str | None = None
        self.children: list[_Node] = []
        self.start = start


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int | None = None) -> NewickError:
        pos = self.pos if pos is None else pos
        return NewickError(message, len(self.text[:pos].encode()))

    def skip(self) -> None:
        """Whitespace and ``[...]`` comments."""
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "[":
                close = text.find("]", self.pos)
                if close < 0:
                    raise self.error("unterminated comment")
                self.pos = close + 1
            else:
                return

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def label(self) -> str | None:
        ch = self.peek()
        if ch == "'":
            out = []
            i = self.pos + 1
            while True:
                close = self.text.find("'", i)
                if close < 0:
                    raise self.error("unterminated quoted label")
                out.append(self.text[i:close])
                if self.text.startswith("''", close):
                    out.append("'")
                    i = close + 2
                    continue
                self.pos = close + 1
                return "".join(out)
        m = _PLAIN.match(self.text, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return m.group()

    def branch_length(self) -> None:
        if self.peek() != ":":
            return
        self.pos += 1
        self.skip()
        m = _PLAIN.match(self.text, self.pos)
        if m is None:
            raise self.error("missing branch length after ':'")
        try:
            float(m.group())
        except ValueError:
            raise self.error(f"bad branch length {m.group()!r}") from None
        self.pos = m.end()

    def subtree(self) -> _Node:
        # Explicit stack of open internal nodes, so deep caterpillars do not
        # hit the recursion limit.
        root = _Node(self.pos)
        stack: list[_Node] = []
        self._start(root, stack)
        while stack:
            node = stack[-1]
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                child = _Node(self.pos)
                node.children.append(child)
                self._start(child, stack)
            elif ch == ")":
                self.pos += 1
                stack.pop()
                node.label = self.label()
                self.branch_length()
            elif ch == "":
                raise self.error("unbalanced parentheses: missing ')'", node.start)
            elif ch == ";":
                raise self.error("unbalanced parentheses: missing ')' before ';'")
            else:
                raise self.error(f"unexpected {ch!r}")
        return root

    def _start(self, node: _Node, stack: list) -> None:
        """Descend through ``(`` until a leaf, which is read in full."""
        while self.peek() == "(":
            self.pos += 1
            stack.append(node)
            child = _Node(self.pos)
            node.children.append(child)
            node = child
        node.label = self.label()
        if node.label is None:
            ch = self.peek()
            raise self.error(f"expected a label, found {ch!r}" if ch else "expected a label")
        self.branch_length()


def parse_newick(text: str, degree_bound: int | None = None) -> RootedTree:
    """Parse one ``subtree;`` document into a ``RootedTree``."""
    reader = _Reader(text)
    if reader.peek() == "":
        raise NewickError("empty input", 0)
    if reader.peek() == ")":
        raise reader.error("unbalanced parentheses: unexpected ')'")
    root = reader.subtree()
    if reader.peek() != ";":
        ch = reader.peek()
        if ch == ")":
            raise reader.error("unbalanced parentheses: unexpected ')'")
        raise reader.error("expected ';'" if not ch else f"expected ';', found {ch!r}")
    reader.pos += 1
    if reader.peek():
        raise reader.error("trailing text after ';'")
    return _build(root, degree_bound)


def _build(root: _Node, degree_bound: int | None) -> RootedTree:
    preorder = []
    stack = [root]
    while stack:
        node = stack.pop()
        preorder.append(node)
        stack.extend(reversed(node.children))
    postorder = _postorder(root)
    n = len(preorder)

    ids: dict[int, int] = {}
    labels = [node.label for node in preorder]
    if all(lab is not None and lab.isdigit() for lab in labels) and sorted(map(int, labels)) == list(
        range(1, n + 1)
    ):
        for node in preorder:
            ids[id(node)] = int(node.label)
    else:
        nxt = 1
        for node in preorder:
            if not node.children:
                ids[id(node)] = nxt
                nxt += 1
        for node in postorder:
            if node.children:
                ids[id(node)] = nxt
                nxt += 1

    parent = {}
    children = {}
    names = {}
    for node in preorder:
        me = ids[id(node)]
        if node.label is not None:
            names[me] = node.label
        if node.children:
            children[me] = [ids[id(c)] for c in node.children]
            for c in node.children:
                parent[ids[id(c)]] = me
    return RootedTree(parent, n, degree_bound=degree_bound, children=children, names=names)


def _postorder(root: _Node) -> list[_Node]:
    out = []
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done or not node.children:
            out.append(node)
            continue
        stack.append((node, True))
        stack.extend((c, False) for c in reversed(node.children))
    return out


def _quote(label: str) -> str:
    if label and not (_SPECIAL & set(label)):
        return label
    return "'" + label.replace("'", "''") + "'"


def write_newick(t: RootedTree, names: dict[int, str] | None = None) -> str:
    """Canonical text: stored child order, no branch lengths.

    Nodes are labeled from ``names`` (default ``t.names``). A tree without
    any names is written with every node labeled by its id; otherwise only
    unnamed leaves fall back to their id and unnamed internal nodes stay bare.
    """
    names = t.names if names is None else names
    kids = t._children

    def label(v: int) -> str:
        if v in names:
            return _quote(str(names[v]))
        if kids[v] and names:
            return ""
        return str(v)

    parts: dict[int, str] = {}
    for v in reversed(t.bfs_order()):
        if kids[v]:
            parts[v] = "(" + ",".join(parts.pop(c) for c in kids[v]) + ")" + label(v)
        else:
            parts[v] = label(v)
    return parts[t.root] + ";"


def write_parent_array(t: RootedTree) -> str:
    """``n d root`` header, then one ``child parent`` line per edge."""
    lines = [f"{t.n} {t.degree_bound} {t.root}"]
    par = t.parent
    lines.extend(f"{c} {par[c]}" for c in sorted(par))
    return "\n".join(lines) + "\n"


def parse_parent_array(text: str) -> RootedTree:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise InvalidArgument("empty parent-array input")
    try:
        header = [int(x) for x in rows[0]]
        edges = [(int(c), int(p)) for c, p in rows[1:]]
    except ValueError:
        raise InvalidArgument("parent-array lines must hold integers, two per edge line") from None
    if len(header) != 3:
        raise InvalidArgument("parent-array header must be 'n d root'")
    n, d, root = header
    parent = {}
    for c, p in edges:
        if c in parent:
            raise InvalidArgument(f"node {c} listed twice")
        parent[c] = p
    t = RootedTree(parent, n, degree_bound=d)
    if t.root != root:
        raise InvalidArgument(f"header root {root} but parent map is rooted at {t.root}")
    return t


def read_tree(path: str | FilePath, degree_bound: int | None = None) -> RootedTree:
    """Load a Newick or parent-array file, telling them apart by content."""
    text = FilePath(path).read_text()
    if "(" in text or ";" in text:
        return parse_newick(text, degree_bound)
    return parse_parent_array(text)
