import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from treequery.errors import InvalidArgument
from treequery.generate import (
    gen_binary_tree,
    gen_chain,
    gen_pruefer_tree,
    gen_spider_tree,
    orient,
    pruefer_decode,
    pruefer_sequence,
)


def test_pruefer_decode_star():
    edges = pruefer_decode([3, 3], 4)
    assert sorted(tuple(sorted(e)) for e in edges) == [(1, 3), (2, 3), (3, 4)]
    for root in range(1, 5):
        assert orient(edges, 4, root).degree(3) == 3


def test_pruefer_two_nodes():
    t = gen_pruefer_tree(2, 2, 0)
    assert t.n == 2 and len(t.edges()) == 1


def test_pruefer_large_has_degree_exactly_d():
    t = gen_pruefer_tree(1000, 5, 3)
    assert t.max_degree == 5 and t.degree_bound == 5
    assert len(t.bfs_order()) == 1000


def test_pruefer_infeasible():
    with pytest.raises(InvalidArgument):
        gen_pruefer_tree(4, 5, 0)
    with pytest.raises(InvalidArgument):
        gen_pruefer_tree(1, 3, 0)


@settings(max_examples=80, deadline=None)
@given(st.integers(3, 300), st.integers(2, 9), st.integers(0, 10**6))
def test_pruefer_code_constraints(n, d, seed):
    if n - 2 < d - 1:
        return
    seq = pruefer_sequence(n, d, random.Random(seed))
    counts = Counter(seq)
    assert len(seq) == n - 2
    assert max(counts.values()) == d - 1
    t = gen_pruefer_tree(n, d, seed)
    assert t.max_degree == d


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 200), st.integers(2, 8), st.integers(0, 10**6))
def test_decode_degrees_follow_code(n, d, seed):
    if n - 2 < d - 1:
        return
    seq = pruefer_sequence(n, d, random.Random(seed))
    t = orient(pruefer_decode(seq, n), n, 1)
    counts = Counter(seq)
    assert all(t.degree(v) == counts[v] + 1 for v in t.nodes)


def test_pruefer_deterministic():
    a, b = gen_pruefer_tree(300, 4, 8), gen_pruefer_tree(300, 4, 8)
    assert a.parent == b.parent and a.root == b.root


def test_binary_small():
    t = gen_binary_tree(2, 0)
    assert t.is_proper_binary() and sorted(t.leaves) == [1, 2] and t.n == 3
    assert gen_binary_tree(1, 0).n == 1
    with pytest.raises(InvalidArgument):
        gen_binary_tree(0, 0)


def _shape_counts(k, samples):
    return Counter(gen_binary_tree(k, random.Random(i)).leaf_tree().canonical() for i in range(samples))


def test_binary_uniform_three_leaves():
    counts = _shape_counts(3, 30000)
    assert len(counts) == 3
    assert chisquare(list(counts.values())).pvalue > 0.01


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 200), st.integers(0, 10**6))
def test_binary_is_proper(k, seed):
    t = gen_binary_tree(k, seed)
    assert t.is_proper_binary()
    assert sorted(t.leaves) == list(range(1, k + 1))
    assert t.n == 2 * k - 1


def test_spider_examples():
    t = gen_spider_tree(7, 3)
    assert t.root == 1 and len(t.children(1)) == 3
    assert sorted(t.subtree_size(c) for c in t.children(1)) == [2, 2, 2]
    t = gen_spider_tree(61, 6)
    assert t.n == 61 and [t.subtree_size(c) for c in t.children(1)] == [10] * 6
    assert t.degree(1) == 6 and all(t.degree(v) <= 3 for v in t.nodes if v != 1)
    with pytest.raises(InvalidArgument):
        gen_spider_tree(3, 3)


def test_chain():
    t = gen_chain(5)
    assert t.depth(5) == 4 and t.root == 1
