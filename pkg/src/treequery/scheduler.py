"""Cooperative round scheduler.

A task is a generator. It yields ``Batch(queries)`` to submit queries and is
resumed with the answers, or ``Spawn(factories)`` to run subtasks in
parallel and is resumed with their results. One scheduler step answers the
union of every pending batch as a single ledger round, so concurrently
active subproblems share rounds no matter how deep they sit in the
recursion.

Each task gets its own ``random.Random`` seeded from the global seed and its
spawn path (``(0, 2, 1)`` = root task 0, its third child, that child's second
child), which makes the set of queries independent of scheduling and of the
sequential flag.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Generator, Sequence

from .errors import ProtocolError
from .oracle import Oracle, Query

TaskGen = Generator[Any, Any, Any]
TaskFactory = Callable[[random.Random], TaskGen]


@dataclass
class Batch:
    queries: list[Query]


@dataclass
class Spawn:
    factories: list[TaskFactory]


def ask(queries: list[Query]):
    """Submit one batch from inside a task; empty batches cost nothing."""
    if not queries:
        return []
    answers = yield Batch(queries)
    return answers


def spawn(*factories: TaskFactory):
    results = yield Spawn(list(factories))
    return results


def task_rng(seed: int | str, path: Sequence[int]) -> random.Random:
    return random.Random(f"{seed}/{'.'.join(map(str, path))}")


@dataclass
class _Task:
    tid: int
    path: tuple[int, ...]
    gen: TaskGen
    parent: _Task | None
    # Per-task event log: "B" for a submitted batch, a list of child ids for a spawn.
    events: list = field(default_factory=list)
    waiting: int = 0
    results: list = field(default_factory=list)
    result: Any = None
    done: bool = False


class RoundScheduler:
    """Runs tasks to completion, merging their batches into global rounds.

    With ``sequential=True`` every query becomes its own round, so R equals Q
    while the queries themselves stay the same.
    """

    def __init__(self, oracle: Oracle, seed: int | str = 0, sequential: bool = False):
        self.oracle = oracle
        self.seed = seed
        self.sequential = sequential
        self.tasks: list[_Task] = []
        self.round_tasks: list[list[int]] = []

    @property
    def ledger(self):
        return self.oracle.ledger

    def _new_task(self, factory: TaskFactory, path: tuple[int, ...], parent: _Task | None) -> _Task:
        task = _Task(len(self.tasks), path, factory(task_rng(self.seed, path)), parent)
        self.tasks.append(task)
        return task

    def run(self, factories: Sequence[TaskFactory]) -> list:
        roots = [self._new_task(f, (i,), None) for i, f in enumerate(factories)]
        ready: list[tuple[int, Any]] = [(t.tid, None) for t in roots]
        heapq.heapify(ready)
        pending: list[tuple[_Task, list[Query]]] = []

        while True:
            while ready:
                tid, value = heapq.heappop(ready)
                task = self.tasks[tid]
                try:
                    item = task.gen.send(value)
                except StopIteration as stop:
                    task.done = True
                    task.result = stop.value
                    parent = task.parent
                    if parent is not None:
                        parent.waiting -= 1
                        if parent.waiting == 0:
                            values = [self.tasks[c].result for c in parent.events[-1]]
                            heapq.heappush(ready, (parent.tid, values))
                    continue
                if isinstance(item, Batch):
                    if not item.queries:
                        raise ProtocolError(f"task {task.path} submitted an empty batch")
                    task.events.append("B")
                    pending.append((task, item.queries))
                elif isinstance(item, Spawn):
                    kids = [
                        self._new_task(f, task.path + (i,), task) for i, f in enumerate(item.factories)
                    ]
                    task.events.append([k.tid for k in kids])
                    if not kids:
                        heapq.heappush(ready, (task.tid, []))
                    task.waiting = len(kids)
                    for k in kids:
                        heapq.heappush(ready, (k.tid, None))
                else:
                    raise ProtocolError(f"task {task.path} yielded {item!r}")

            if not pending:
                assert all(t.done for t in self.tasks), "deadlock: suspended tasks without batches"
                return [t.result for t in roots]

            pending.sort(key=lambda p: p[0].tid)
            if self.sequential:
                for task, queries in pending:
                    answers = []
                    for q in queries:
                        answers.extend(self.oracle.ask([q]))
                        self.round_tasks.append([task.tid])
                    heapq.heappush(ready, (task.tid, answers))
            else:
                merged = [q for _, queries in pending for q in queries]
                answers = self.oracle.ask(merged)
                self.round_tasks.append([task.tid for task, _ in pending])
                pos = 0
                for task, queries in pending:
                    heapq.heappush(ready, (task.tid, answers[pos : pos + len(queries)]))
                    pos += len(queries)
            pending = []

    def critical_path(self, tid: int = 0) -> int:
        """Rounds along the longest chain of dependent batches below task ``tid``.

        Computed from the task event logs alone; in batched mode it equals the
        number of rounds the run used.
        """
        memo: dict[int, int] = {}
        order = []
        stack = [tid]
        while stack:
            t = stack.pop()
            order.append(t)
            for ev in self.tasks[t].events:
                if ev != "B":
                    stack.extend(ev)
        for t in reversed(order):
            total = 0
            for ev in self.tasks[t].events:
                total += 1 if ev == "B" else max((memo[c] for c in ev), default=0)
            memo[t] = total
        return memo[tid]


def run_tasks(
    oracle: Oracle, factories: Sequence[TaskFactory], seed: int | str = 0, sequential: bool = False
) -> list:
    return RoundScheduler(oracle, seed, sequential).run(factories)
