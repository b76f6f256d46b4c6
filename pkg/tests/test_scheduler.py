from functools import partial

import pytest

from treequery.errors import ProtocolError
from treequery.generate import gen_binary_tree
from treequery.oracle import Oracle, Path
from treequery.recon_relative import reconstruct_relative
from treequery.scheduler import Batch, RoundScheduler, ask, spawn


def batches(k, rng=None):
    out = []
    for _ in range(k):
        out.append((yield from ask([Path(1, 2)])))
    return len(out)


def prefix_then_children(prefix, kids, rng):
    yield from batches(prefix)
    return (yield from spawn(*(partial(batches, k) for k in kids)))


def test_two_one_batch_tasks_share_a_round(t_ex):
    sched = RoundScheduler(Oracle(t_ex))
    assert sched.run([partial(batches, 1), partial(batches, 1)]) == [1, 1]
    assert sched.ledger.total_rounds == 1
    assert sched.ledger.total_queries == 2


def test_rounds_are_max_not_sum(t_ex):
    sched = RoundScheduler(Oracle(t_ex))
    sched.run([partial(batches, 3), partial(batches, 1)])
    assert sched.ledger.total_rounds == 3
    assert sched.round_tasks == [[0, 1], [0], [0]]


def test_merge_bound_with_shared_prefix(t_ex):
    # parent's sequential prefix of 2 rounds, then children needing 3 and 1
    sched = RoundScheduler(Oracle(t_ex))
    (result,) = sched.run([partial(prefix_then_children, 2, [3, 1])])
    assert result == [3, 1]
    assert sched.ledger.total_rounds == 2 + 3
    assert sched.critical_path() == 5


def test_nested_spawns_merge_across_depths(t_ex):
    def deep(rng):
        yield from ask([Path(1, 1)])
        return (yield from spawn(partial(batches, 2), partial(prefix_then_children, 1, [1])))

    sched = RoundScheduler(Oracle(t_ex))
    sched.run([deep, partial(batches, 4)])
    # deep: 1 + max(2, 1 + 1) = 3; the sibling needs 4
    assert sched.ledger.total_rounds == 4


def test_empty_ask_costs_nothing(t_ex):
    def task(rng):
        got = yield from ask([])
        return got

    sched = RoundScheduler(Oracle(t_ex))
    assert sched.run([task]) == [[]]
    assert sched.ledger.total_rounds == 0


def test_empty_batch_is_protocol_error(t_ex):
    def bad(rng):
        yield Batch([])

    with pytest.raises(ProtocolError):
        RoundScheduler(Oracle(t_ex)).run([bad])


def test_bad_yield_is_protocol_error(t_ex):
    def bad(rng):
        yield 42

    with pytest.raises(ProtocolError):
        RoundScheduler(Oracle(t_ex)).run([bad])


def test_answers_arrive_after_the_whole_round(t_ex):
    seen = []

    def task(tag, rng):
        seen.append(("submit", tag))
        yield from ask([Path(1, 7)])
        seen.append(("answer", tag))

    RoundScheduler(Oracle(t_ex)).run([partial(task, "a"), partial(task, "b")])
    assert seen == [("submit", "a"), ("submit", "b"), ("answer", "a"), ("answer", "b")]


def test_sequential_mode_one_query_per_round(t_ex):
    def task(rng):
        return (yield from ask([Path(1, v) for v in range(1, 8)]))

    sched = RoundScheduler(Oracle(t_ex), sequential=True)
    assert sched.run([task]) == [[1] * 7]
    assert sched.ledger.total_rounds == sched.ledger.total_queries == 7


def test_task_rngs_depend_on_path_not_order(t_ex):
    def draw(rng):
        return rng.random()
        yield  # pragma: no cover

    a = RoundScheduler(Oracle(t_ex), seed=5).run([draw, draw])
    b = RoundScheduler(Oracle(t_ex), seed=5).run([draw, draw])
    assert a == b and a[0] != a[1]


def test_eight_leaf_rounds_equal_critical_path():
    for seed in range(10):
        t = gen_binary_tree(8, seed)
        _, sched = reconstruct_relative(t, seed)
        assert sched.ledger.total_rounds == sched.critical_path()
        assert sum(len(r) > 0 for r in sched.round_tasks) == sched.ledger.total_rounds
