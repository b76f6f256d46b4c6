import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from literal import LiteralTree
from treequery.errors import InvalidArgument, OracleInconsistency, UnsupportedQuery
from treequery.generate import gen_binary_tree
from treequery.newick import parse_newick
from treequery.oracle import Closer, Oracle, Path, QueryLedger, answer_batch, attach_transcript, count

from test_tree import random_trees

A, B, C, D, E = 1, 2, 3, 4, 5  # leaf ids of the five-leaf fixture


def test_closer_example(five):
    led = QueryLedger()
    assert answer_batch(five, [Closer(A, B, C)], led) == [(A, B)]
    assert (led.total_queries, led.total_rounds) == (1, 1)


def test_path_examples(t_ex):
    led = QueryLedger()
    assert answer_batch(t_ex, [Path(1, 7), Path(4, 5)], led) == [1, 0]
    assert (led.total_queries, led.total_rounds) == (2, 1)
    assert answer_batch(t_ex, [Path(3, 3)], led) == [1]
    assert (led.total_queries, led.total_rounds) == (3, 2)


def test_count_examples(t_ex):
    led = QueryLedger()
    assert count(t_ex, 2, [4, 5, 6], led) == 2
    assert count(t_ex, 1, list(t_ex.nodes), led) == 7
    assert count(t_ex, 7, [1, 2, 3], led) == 0
    assert led.round_sizes == [3, 7, 3]


def test_errors(t_ex, five):
    led = QueryLedger()
    with pytest.raises(InvalidArgument):
        answer_batch(t_ex, [], led)
    with pytest.raises(InvalidArgument):
        answer_batch(five, [Closer(A, B, 6)], led)  # 6 is internal
    with pytest.raises(InvalidArgument):
        answer_batch(five, [Closer(A, A, B)], led)
    with pytest.raises(InvalidArgument):
        answer_batch(t_ex, [Path(0, 1)], led)
    star = parse_newick("(a,b,c);")
    with pytest.raises(UnsupportedQuery):
        answer_batch(star, [Closer(1, 2, 3)], led)
    assert led.total_rounds == 0


def test_transcript_format(t_ex, five):
    led = QueryLedger()
    answer_batch(t_ex, [Path(1, 7), Path(4, 5)], led)
    answer_batch(five, [Closer(C, D, E)], led)
    assert led.transcript() == "R1: P(1,7);P(4,5)\nA1: 1;0\nR2: C(3,4,5)\nA2: (3,4)\n"


def test_duplicates_are_counted(t_ex):
    led = QueryLedger()
    answer_batch(t_ex, [Path(1, 2)] * 3, led)
    assert led.total_queries == 3


@settings(max_examples=80, deadline=None)
@given(random_trees(max_n=30))
def test_path_answers_match_literal(t):
    lit = LiteralTree(t.parent, t.n)
    batch = [Path(u, v) for u in t.nodes for v in t.nodes]
    answers = Oracle(t, audit=True).ask(batch)
    assert answers == [int(lit.is_ancestor(u, v)) for u, v in batch]


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 14), st.integers(0, 10**6))
def test_closer_answers_match_literal(k, seed):
    t = gen_binary_tree(k, seed)
    lit = LiteralTree(t.parent, t.n)
    leaves = list(t.leaves)
    batch = [Closer(u, v, w) for u in leaves for v in leaves for w in leaves if len({u, v, w}) == 3]
    answers = Oracle(t, audit=True).ask(batch)
    for q, a in zip(batch, answers):
        assert a == lit.closer(*q)
        assert set(a) <= set(q)


@settings(max_examples=40, deadline=None)
@given(random_trees(max_n=30), st.lists(st.integers(1, 6), min_size=1, max_size=8))
def test_ledger_arithmetic(t, sizes):
    oracle = Oracle(t)
    nodes = list(t.nodes)
    for i, size in enumerate(sizes):
        oracle.ask([Path(nodes[(i + j) % t.n], nodes[j % t.n]) for j in range(size)])
    led = oracle.ledger
    assert led.total_queries == sum(sizes) == sum(len(b) for b, _ in led.rounds)
    assert led.total_rounds == len(sizes) == len(led.rounds)
    assert all(len(b) == len(a) for b, a in led.rounds)


def test_inconsistency_carries_transcript(t_ex):
    led = QueryLedger()
    with pytest.raises(OracleInconsistency) as err:
        with attach_transcript(led):
            answer_batch(t_ex, [Path(1, 7)], led)
            raise OracleInconsistency("contradiction")
    assert err.value.transcript == "R1: P(1,7)\nA1: 1\n"
