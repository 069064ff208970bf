import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mlsda.open_stack import OpenStack, PriorityKey, StackEntry


def entry(metric, level=0, tb=0, tag=None):
    return StackEntry(PriorityKey(metric, level, tb), tag)


class ListOracle:
    """Sorted-list reference with the same key and capacity rules."""

    def __init__(self, capacity=None):
        self.capacity = capacity
        self.items = []
        self.serial = 0

    def push(self, e):
        self.items.append(((*e.key.order(), self.serial), e))
        self.serial += 1
        self.items.sort(key=lambda t: t[0])
        if self.capacity is not None and len(self.items) > self.capacity:
            return self.items.pop()[1]
        return None

    def pop_best(self):
        return self.items.pop(0)[1]

    def pop_worst(self):
        return self.items.pop()[1]

    def remove(self, e):
        k = next(i for i, (_, x) in enumerate(self.items) if x is e)
        return self.items.pop(k)[1]


def run_ops(ops, capacity):
    stack, oracle = OpenStack(capacity), ListOracle(capacity)
    live = []
    for op, metric, level, tb, pick in ops:
        if op == 0 or not live:
            a = entry(metric, level, tb)
            b = StackEntry(a.key, a.path)
            ev_s, ev_o = stack.push(a), oracle.push(b)
            pair = (a, b)
            live.append(pair)
            if ev_s is not None or ev_o is not None:
                assert ev_s is not None and ev_o is not None
                k = next(i for i, p in enumerate(live) if p[0] is ev_s)
                assert live[k][1] is ev_o
                live.pop(k)
        elif op == 1:
            s, o = stack.pop_best(), oracle.pop_best()
            k = next(i for i, p in enumerate(live) if p[0] is s)
            assert live.pop(k)[1] is o
        elif op == 2:
            s, o = stack.pop_worst(), oracle.pop_worst()
            k = next(i for i, p in enumerate(live) if p[0] is s)
            assert live.pop(k)[1] is o
        else:
            a, b = live.pop(pick % len(live))
            assert stack.remove(a) is a
            oracle.remove(b)
        stack.check()
        assert len(stack) == len(oracle.items)
        if capacity is not None:
            assert len(stack) <= capacity
    order = []
    while stack:
        s = stack.pop_best()
        order.append(next(p for p in live if p[0] is s)[1])
    assert order == [e for _, e in oracle.items]


op_strategy = st.tuples(
    st.integers(0, 3),
    st.sampled_from([0.0, 0.5, 1.0, 1.5, 2.0, 3.0]),
    st.integers(0, 4),
    st.integers(0, 3),
    st.integers(0, 1000),
)


@settings(max_examples=300, deadline=None)
@given(st.lists(op_strategy, max_size=80), st.one_of(st.none(), st.integers(1, 8)))
def test_matches_sorted_list_oracle(ops, capacity):
    run_ops(ops, capacity)


def test_push_into_empty():
    s = OpenStack()
    assert s.push(entry(1.0)) is None
    assert len(s) == 1


def test_capacity_evicts_incoming_worst():
    s = OpenStack(2)
    s.push(entry(1.0))
    s.push(entry(2.0))
    e = entry(3.0)
    assert s.push(e) is e
    assert not e.live and len(s) == 2


def test_capacity_evicts_existing_worst():
    s = OpenStack(2)
    s.push(entry(1.0))
    w = entry(2.0)
    s.push(w)
    assert s.push(entry(0.5)) is w
    assert [s.pop_best().key.metric for _ in range(2)] == [0.5, 1.0]


def test_deeper_level_wins_metric_tie():
    s = OpenStack()
    s.push(entry(2.0, 3, tag="shallow"))
    s.push(entry(2.0, 5, tag="deep"))
    assert s.pop_best().path == "deep"


def test_tiebreak_then_insertion_order():
    s = OpenStack()
    s.push(entry(1.0, 2, 9, "late-tb"))
    s.push(entry(1.0, 2, 4, "first"))
    s.push(entry(1.0, 2, 4, "second"))
    assert [s.pop_best().path for _ in range(3)] == ["first", "second", "late-tb"]


def test_pop_order_and_single():
    s = OpenStack()
    for mtr in (0.4, 0.1, 0.9):
        s.push(entry(mtr))
    assert [s.pop_best().key.metric for _ in range(3)] == [0.1, 0.4, 0.9]
    s.push(entry(7.0, tag="only"))
    assert s.pop_best().path == "only"


def test_remove_by_handle():
    s = OpenStack()
    a, b = entry(1.0, tag="a"), entry(2.0, tag="b")
    s.push(a)
    s.push(b)
    s.remove(a)
    assert s.pop_best() is b
    with pytest.raises(KeyError):
        s.remove(a)
    with pytest.raises(KeyError):
        OpenStack().remove(entry(0.0))


def test_peak_size():
    s = OpenStack()
    for mtr in (1, 2, 3):
        s.push(entry(float(mtr)))
    s.pop_best()
    s.pop_best()
    assert s.peak_size() == 3 and len(s) == 1


def test_empty_errors():
    s = OpenStack()
    with pytest.raises(IndexError):
        s.pop_best()
    with pytest.raises(IndexError):
        s.pop_worst()
    with pytest.raises(ValueError):
        OpenStack(0)


def test_double_push_rejected():
    s = OpenStack()
    e = entry(1.0)
    s.push(e)
    with pytest.raises(ValueError):
        s.push(e)


def _mixed_ops_time(n_ops, seed=0):
    rng = np.random.default_rng(seed)
    metrics = rng.random(n_ops)
    kinds = rng.random(n_ops)
    s = OpenStack(capacity=n_ops // 4)
    t = time.perf_counter()
    for mtr, kind in zip(metrics, kinds):
        if kind < 0.6 or not s:
            s.push(StackEntry(PriorityKey(float(mtr), 0, 0)))
        elif kind < 0.9:
            s.pop_best()
        else:
            s.pop_worst()
    return time.perf_counter() - t


def test_cost_grows_quasi_linearly():
    small = min(_mixed_ops_time(20000, s) for s in range(2))
    large = min(_mixed_ops_time(200000, s) for s in range(2))
    # ten times the work with log-depth updates: well under the quadratic 100x
    assert large / small < 25
