"""The responder: exact answers to batched relative-distance and path queries.

Answers come from an index built once per hidden tree: preorder intervals
for ancestry and an Euler-tour sparse table for lca depths. With
``audit=True`` every answer is re-derived through ``RootedTree``'s
parent-chain walks and a mismatch raises immediately.
"""

from __future__ import annotations

import hashlib
import weakref
from contextlib import contextmanager
from typing import NamedTuple, Sequence, Union

from .errors import InvalidArgument, OracleInconsistency, UnsupportedQuery
from .tree import RootedTree


class Closer(NamedTuple):
    """Which two of three distinct leaves have the deeper lca."""

    u: int
    v: int
    w: int


class Path(NamedTuple):
    """Is ``u`` an ancestor of ``v`` (reflexive)."""

    u: int
    v: int


Query = Union[Closer, Path]
# A CloserPair is a 2-tuple of operands; a PathBit is 0 or 1.
Answer = Union[tuple, int]


def format_query(q: Query) -> str:
    if type(q) is Path:
        return f"P({q.u},{q.v})"
    return f"C({q.u},{q.v},{q.w})"


def format_answer(a: Answer) -> str:
    if isinstance(a, tuple):
        return f"({a[0]},{a[1]})"
    return str(a)


class QueryLedger:
    """Append-only record of rounds; ``total_queries`` is Q, ``total_rounds`` is R.

    With ``keep_rounds=False`` only the per-round sizes are retained, which is
    what large benchmark runs need.
    """

    def __init__(self, keep_rounds: bool = True):
        self.keep_rounds = keep_rounds
        self.rounds: list[tuple[list, list]] = []
        self.round_sizes: list[int] = []
        self.total_queries = 0

    @property
    def total_rounds(self) -> int:
        return len(self.round_sizes)

    def record(self, batch: Sequence[Query], answers: Sequence[Answer]) -> None:
        if len(batch) != len(answers):
            raise InvalidArgument("answers must align with the batch")
        if not batch:
            raise InvalidArgument("a round must contain at least one query")
        self.round_sizes.append(len(batch))
        self.total_queries += len(batch)
        if self.keep_rounds:
            self.rounds.append((list(batch), list(answers)))

    def transcript(self) -> str:
        if not self.keep_rounds:
            raise InvalidArgument("ledger was created without keeping rounds")
        lines = []
        for k, (batch, answers) in enumerate(self.rounds, 1):
            lines.append(f"R{k}: " + ";".join(map(format_query, batch)))
            lines.append(f"A{k}: " + ";".join(map(format_answer, answers)))
        return "\n".join(lines) + ("\n" if lines else "")

    def digest(self) -> str:
        """Hash of the transcript, or of the round sizes if rounds were dropped."""
        if self.keep_rounds:
            text = self.transcript()
        else:
            text = ",".join(map(str, self.round_sizes))
        return hashlib.sha256(text.encode()).hexdigest()


class Oracle:
    """Exact responder over a hidden ``RootedTree``.

    ``ask`` answers one batch and appends it to the ledger as one round.
    """

    def __init__(self, tree: RootedTree, ledger: QueryLedger | None = None, audit: bool = False):
        self.tree = tree
        self.ledger = ledger if ledger is not None else QueryLedger()
        self.audit = audit
        self._audit_chains: dict[int, list[int]] = {}
        self._audit_sets: dict[int, frozenset] = {}
        self._build_index()

    def _build_index(self) -> None:
        t = self.tree
        n = t.n
        tin = [0] * (n + 1)
        end = [0] * (n + 1)
        first = [0] * (n + 1)
        euler: list[int] = []  # depths along the Euler tour
        depth = [0] * (n + 1)
        clock = 0
        stack = [(t.root, 0)]
        while stack:
            v, i = stack.pop()
            kids = t._children[v]
            if i == 0:
                tin[v] = clock
                clock += 1
                first[v] = len(euler)
            euler.append(depth[v])
            if i < len(kids):
                stack.append((v, i + 1))
                c = kids[i]
                depth[c] = depth[v] + 1
                stack.append((c, 0))
            else:
                end[v] = clock
        self._tin, self._end, self._first, self._depth = tin, end, first, depth
        self._euler = euler
        self._is_leaf = [False] + [not t._children[v] for v in range(1, n + 1)]
        self._table: list[list[int]] | None = None

    def _sparse_table(self) -> list[list[int]]:
        if self._table is None:
            table = [self._euler]
            half = 1
            while 2 * half <= len(self._euler):
                prev = table[-1]
                table.append(list(map(min, prev[:-half], prev[half:])))
                half *= 2
            self._table = table
        return self._table

    def _lca_depth(self, a: int, b: int) -> int:
        lo, hi = self._first[a], self._first[b]
        if lo > hi:
            lo, hi = hi, lo
        k = (hi - lo + 1).bit_length() - 1
        row = self._table[k]
        x, y = row[lo], row[hi - (1 << k) + 1]
        return x if x < y else y

    # -- answering --------------------------------------------------------

    def _path(self, q: Path) -> int:
        u, v = q
        n = self.tree.n
        if not (isinstance(u, int) and isinstance(v, int) and 1 <= u <= n and 1 <= v <= n):
            raise InvalidArgument(f"path query on unknown node in {format_query(q)}")
        t = self._tin[v]
        return 1 if self._tin[u] <= t < self._end[u] else 0

    def _closer(self, q: Closer) -> tuple:
        u, v, w = q
        n = self.tree.n
        for x in q:
            if not (isinstance(x, int) and 1 <= x <= n):
                raise InvalidArgument(f"closer query on unknown node in {format_query(q)}")
            if not self._is_leaf[x]:
                raise InvalidArgument(f"closer query on non-leaf {x}")
        if u == v or u == w or v == w:
            raise InvalidArgument(f"closer query needs three distinct leaves: {format_query(q)}")
        duv = self._lca_depth(u, v)
        duw = self._lca_depth(u, w)
        dvw = self._lca_depth(v, w)
        if duv > duw and duv > dvw:
            return (u, v)
        if duw > duv and duw > dvw:
            return (u, w)
        if dvw > duv and dvw > duw:
            return (v, w)
        raise UnsupportedQuery(f"{format_query(q)} has no unique closest pair")

    def answer(self, batch: Sequence[Query]) -> list[Answer]:
        """Answer without touching the ledger."""
        out: list[Answer] = []
        for q in batch:
            kind = type(q)
            if kind is Path:
                out.append(self._path(q))
            elif kind is Closer:
                if self._table is None:
                    self._sparse_table()
                out.append(self._closer(q))
            else:
                raise InvalidArgument(f"not a query: {q!r}")
        if self.audit:
            self._audit(batch, out)
        return out

    def ask(self, batch: Sequence[Query]) -> list[Answer]:
        """Answer ``batch`` as one round and record it."""
        if not batch:
            raise InvalidArgument("a round must contain at least one query")
        answers = self.answer(batch)
        self.ledger.record(batch, answers)
        return answers

    # -- independent recomputation ----------------------------------------

    def _chain(self, v: int) -> list[int]:
        chain = self._audit_chains.get(v)
        if chain is None:
            chain = self._audit_chains[v] = self.tree.ancestors(v)
            self._audit_sets[v] = frozenset(chain)
        return chain

    def _audit_lca_depth(self, a: int, b: int) -> int:
        self._chain(a)
        above_a = self._audit_sets[a]
        for x in self._chain(b):
            if x in above_a:
                return self.tree.depth(x)
        raise AssertionError("chains never met")

    def _audit(self, batch: Sequence[Query], answers: Sequence[Answer]) -> None:
        for q, a in zip(batch, answers):
            if type(q) is Path:
                self._chain(q.v)
                truth = 1 if q.u in self._audit_sets[q.v] else 0
                if truth != a:
                    raise OracleInconsistency(f"{format_query(q)} answered {a}, tree-core says {truth}")
            else:
                x, y = a
                (z,) = set(q) - {x, y}
                inner = self._audit_lca_depth(x, y)
                if not (inner > self._audit_lca_depth(x, z) and inner > self._audit_lca_depth(y, z)):
                    raise OracleInconsistency(f"{format_query(q)} answered {a}, tree-core disagrees")


@contextmanager
def attach_transcript(ledger: QueryLedger):
    """Give any ``OracleInconsistency`` raised inside the ledger's transcript so far."""
    try:
        yield
    except OracleInconsistency as exc:
        if exc.transcript is None and ledger.keep_rounds:
            exc.transcript = ledger.transcript()
        raise


_oracles: "weakref.WeakKeyDictionary[RootedTree, Oracle]" = weakref.WeakKeyDictionary()


def _oracle_for(tree: RootedTree) -> Oracle:
    oracle = _oracles.get(tree)
    if oracle is None:
        oracle = _oracles[tree] = Oracle(tree)
    return oracle


def answer_batch(tree: RootedTree, batch: Sequence[Query], ledger: QueryLedger) -> list[Answer]:
    """Answer ``batch`` from ``tree`` and append it to ``ledger`` as one round."""
    if not batch:
        raise InvalidArgument("a round must contain at least one query")
    answers = _oracle_for(tree).answer(batch)
    ledger.record(batch, answers)
    return answers


def count(tree: RootedTree, s: int, nodes: Sequence[int], ledger: QueryLedger) -> int:
    """Descendants of ``s`` among ``nodes``, using one round of path queries."""
    return sum(answer_batch(tree, [Path(s, z) for z in nodes], ledger))
