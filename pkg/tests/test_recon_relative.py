import random
from functools import partial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treequery.errors import OracleInconsistency
from treequery.generate import gen_binary_tree
from treequery.newick import parse_newick
from treequery.oracle import Closer, Oracle, QueryLedger
from treequery.recon_relative import link, reconstruct_phylogenetic, reconstruct_relative, split_leaves
from treequery.scheduler import RoundScheduler
from treequery.tree import Clade, LeafTree, leaf_isomorphic

A, B, C, D, E = 1, 2, 3, 4, 5


def run(tree, factory, seed=0):
    sched = RoundScheduler(Oracle(tree), seed)
    (out,) = sched.run([factory])
    return out, sched.ledger


def cherry(x, y):
    return Clade.join(Clade(leaf=x), Clade(leaf=y), (x, y))


def test_single_leaf_no_queries(five):
    out, led = run(five, partial(reconstruct_phylogenetic, [A]))
    assert out.is_leaf and out.leaf == A and led.total_queries == 0


def test_three_leaves_one_query():
    t = parse_newick("((a,b),c);")
    out, led = run(t, partial(reconstruct_phylogenetic, [1, 2, 3]))
    assert led.total_queries == 1
    assert leaf_isomorphic(LeafTree(out), t.leaf_tree())
    assert out.label == (1, 3) or out.label == (2, 3)


def test_five_leaves_every_seed(five):
    for seed in range(40):
        out, sched = reconstruct_relative(five, seed, check=True)
        assert leaf_isomorphic(out, five.leaf_tree())
        assert out.check_labels()


def test_split_examples(five):
    part, led = run(five, lambda rng: split_leaves(A, B, [A, B, C, D, E]))
    assert (part.A, part.B, part.R) == ([], [], [C, D, E])
    assert led.total_rounds == 1
    part, _ = run(five, lambda rng: split_leaves(A, C, [A, B, C, D, E]))
    assert (part.A, part.B, part.R) == ([B], [D, E], [])
    assert part.check([A, B, C, D, E])
    part, led = run(five, lambda rng: split_leaves(A, B, [A, B]))
    assert (part.A, part.B, part.R, led.total_queries) == ([], [], [], 0)


def test_link_onto_single_leaf(five):
    out, led = run(five, lambda rng: link(cherry(A, B), Clade(leaf=C), A))
    assert led.total_queries == 0
    assert out.label == (A, C)
    assert [c.label or c.leaf for c in out.children] == [(A, B), C]


def test_link_above_root(five):
    tr = Clade.join(cherry(C, D), Clade(leaf=E), (C, E))
    out, led = run(five, lambda rng: link(cherry(A, B), tr, A))
    # closer(a,c,d) = (c,d) and closer(a,c,e) = (c,e): a attaches above Tr
    assert sorted(led.rounds[0][1]) == [(C, D), (C, E)]
    assert out.children[1] is tr and out.label[0] == A
    assert leaf_isomorphic(LeafTree(out), five.leaf_tree())


def _edges_by_brute_force(tr, a, ans):
    """Every (u, side) whose child edge satisfies the splice condition, tested one by one."""
    hits = []
    for u in LeafTree(tr).internal_nodes():
        for side, w in enumerate(u.children):
            z = u.label[side]
            if ans(Closer(a, *u.label)) != (a, z):
                continue
            if w.is_leaf or ans(Closer(a, *w.label)) == w.label:
                hits.append((u, side))
    return hits


def test_link_splices_below_sibling():
    t = parse_newick("(((a,x),y),z);")  # a=1 x=2 y=3 z=4
    tr = cherry(3, 4)
    oracle = Oracle(t)
    expected = _edges_by_brute_force(tr, 1, lambda q: oracle.answer([q])[0])
    assert [(u.label, side) for u, side in expected] == [((3, 4), 0)]
    out, _ = run(t, lambda rng: link(cherry(1, 2), tr, 1))
    assert leaf_isomorphic(LeafTree(out), t.leaf_tree())
    assert out.children[0].label == (1, 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 60), st.integers(0, 10**6))
def test_link_matches_brute_force_edge(k, seed):
    t = gen_binary_tree(k, seed)
    rng = random.Random(seed)
    leaves = list(t.leaves)
    a, b = rng.sample(leaves, 2)
    oracle = Oracle(t)
    part = RoundScheduler(oracle).run([lambda r: split_leaves(a, b, leaves)])[0]
    if not part.R:
        return
    (tr,) = RoundScheduler(oracle).run([partial(reconstruct_phylogenetic, part.R)])
    hits = _edges_by_brute_force(tr, a, lambda q: oracle.answer([q])[0])
    assert len(hits) <= 1
    (sub,) = RoundScheduler(oracle).run([partial(reconstruct_phylogenetic, part.A + [a] + part.B + [b])])
    out = RoundScheduler(oracle).run([lambda r: link(sub, tr, a)])[0]
    assert leaf_isomorphic(LeafTree(out), t.leaf_tree())


def test_inconsistent_tree_is_reported():
    # a mislabeled Tr makes two edges qualify: both labels pair leaf 2 with 1's side
    t = parse_newick("((a,b),(c,d));")
    inner = Clade.join(Clade(leaf=3), Clade(leaf=4), (2, 4))
    tr = Clade.join(Clade(leaf=2), inner, (2, 3))
    with pytest.raises(OracleInconsistency):
        run(t, lambda rng: link(Clade(leaf=1), tr, 1))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 300), st.integers(0, 10**6))
def test_exact_and_labels_sound(k, seed):
    t = gen_binary_tree(k, seed)
    out, sched = reconstruct_relative(t, seed, audit=True, check=True)
    assert leaf_isomorphic(out, t.leaf_tree())
    assert out.is_proper_binary() and out.check_labels()
    assert sched.ledger.total_rounds == sched.critical_path()


def test_deterministic_transcript():
    t = gen_binary_tree(200, 3)
    a = reconstruct_relative(t, 11, ledger=QueryLedger())[1].ledger.transcript()
    b = reconstruct_relative(t, 11, ledger=QueryLedger())[1].ledger.transcript()
    c = reconstruct_relative(t, 12, ledger=QueryLedger())[1].ledger.transcript()
    assert a == b and a != c


def test_newick_output_format(five):
    out, _ = reconstruct_relative(five, 0)
    names = {v: five.names[v] for v in five.leaves}
    text = out.to_newick(names)
    assert text.endswith(";") and "lca_" in text
    assert leaf_isomorphic(LeafTree(out.root), five.leaf_tree())
