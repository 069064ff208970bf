"""Capacity-bounded double-ended priority queue (DEAP) for search paths.

The DEAP is a complete binary tree stored 1-based with an empty root: the
left subtree (rooted at index 2) is a min-heap, the right subtree (index 3)
is a max-heap, and every min-heap node is no larger than its partner in the
max-heap. Both ends are reachable in O(1) and every update is O(log S).

Entries double as handles: each one records its array position so that an
arbitrary live entry can be removed without tombstones.
"""

from __future__ import annotations

from typing import Any, Iterator, NamedTuple


class PriorityKey(NamedTuple):
    """Smaller metric first, then deeper level, then smaller tiebreak."""

    metric: float
    level: int
    tiebreak: int

    def order(self) -> tuple:
        return (self.metric, -self.level, self.tiebreak)


class StackEntry:
    __slots__ = ("key", "path", "_order", "_pos")

    def __init__(self, key: PriorityKey, path: Any = None):
        self.key = key
        self.path = path
        self._order: tuple = ()
        self._pos = -1

    @property
    def live(self) -> bool:
        return self._pos > 0

    def __repr__(self):
        return f"StackEntry({self.key.metric!r}, level={self.key.level}, live={self.live})"


class OpenStack:
    """DEAP keyed by ``PriorityKey`` with optional capacity (OPENMAX).

    Keys are made unique by appending an insertion counter, so the order is
    total and pop sequences do not depend on the tree layout.
    """

    def __init__(self, capacity: int | None = None):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._a: list = [None, None]
        self._serial = 0
        self._peak = 0

    def __len__(self) -> int:
        return len(self._a) - 2

    def __bool__(self) -> bool:
        return len(self._a) > 2

    def __iter__(self) -> Iterator[StackEntry]:
        return iter(self._a[2:])

    def __contains__(self, entry: StackEntry) -> bool:
        p = entry._pos
        return 0 < p < len(self._a) and self._a[p] is entry

    def peak_size(self) -> int:
        return self._peak

    def push(self, entry: StackEntry) -> StackEntry | None:
        """Insert ``entry``; if over capacity, evict and return the worst entry."""
        if entry._pos > 0:
            raise ValueError("entry is already in a stack")
        entry._order = (*entry.key.order(), self._serial)
        self._serial += 1
        self._a.append(entry)
        n = len(self._a) - 1
        entry._pos = n
        self._fix(n)
        if self.capacity is not None and len(self) > self.capacity:
            return self.remove(self.peek_worst())
        if len(self) > self._peak:
            self._peak = len(self)
        return None

    def peek_best(self) -> StackEntry:
        if len(self._a) < 3:
            raise IndexError("peek on empty stack")
        return self._a[2]

    def peek_worst(self) -> StackEntry:
        n = len(self._a) - 1
        if n < 2:
            raise IndexError("peek on empty stack")
        return self._a[3 if n >= 3 else 2]

    def pop_best(self) -> StackEntry:
        return self.remove(self.peek_best())

    def pop_worst(self) -> StackEntry:
        return self.remove(self.peek_worst())

    def remove(self, entry: StackEntry) -> StackEntry:
        if entry not in self:
            raise KeyError("stale or foreign stack handle")
        a = self._a
        p = entry._pos
        last = a.pop()
        if last is not entry:
            a[p] = last
            last._pos = p
            self._fix(p)
        entry._pos = -1
        return entry

    # -- tree plumbing -------------------------------------------------------

    @staticmethod
    def _in_min(i: int) -> bool:
        lvl = i.bit_length() - 1
        return i - (1 << lvl) < (1 << (lvl - 1))

    def _swap(self, i: int, j: int):
        a = self._a
        a[i], a[j] = a[j], a[i]
        a[i]._pos = i
        a[j]._pos = j

    def _max_partner(self, i: int) -> int:
        n = len(self._a) - 1
        j = i + (1 << (i.bit_length() - 2))
        if j > n:
            j >>= 1
        return j if j > 1 else 0

    def _min_partner(self, j: int) -> int:
        # the min-heap node opposite j, or one of its children when j is a
        # leaf and the min-heap is one level deeper underneath
        a = self._a
        n = len(a) - 1
        i = j - (1 << (j.bit_length() - 2))
        best = i
        for c, cj in ((2 * i, 2 * j), (2 * i + 1, 2 * j + 1)):
            if c <= n and cj > n and a[c]._order > a[best]._order:
                best = c
        return best

    def _sift_up(self, i: int, top: int, want_less: bool):
        a = self._a
        while i > top:
            p = i >> 1
            if (a[i]._order < a[p]._order) == want_less:
                self._swap(i, p)
                i = p
            else:
                break

    def _sift_down(self, i: int, want_less: bool) -> int:
        a = self._a
        n = len(a) - 1
        while True:
            c = 2 * i
            if c > n:
                return i
            if c + 1 <= n and (a[c + 1]._order < a[c]._order) == want_less:
                c += 1
            if (a[c]._order < a[i]._order) == want_less:
                self._swap(i, c)
                i = c
            else:
                return i

    def _fix(self, i: int):
        """Restore the DEAP invariants after a new element lands at ``i``."""
        a = self._a
        if self._in_min(i):
            if i > 2 and a[i]._order < a[i >> 1]._order:
                self._sift_up(i, 2, True)
                return
            q = self._sift_down(i, True)
            j = self._max_partner(q)
            if j and a[q]._order > a[j]._order:
                self._swap(q, j)
                self._sift_up(j, 3, False)
        else:
            if i > 3 and a[i]._order > a[i >> 1]._order:
                self._sift_up(i, 3, False)
                return
            q = self._sift_down(i, False)
            z = self._min_partner(q)
            if a[q]._order < a[z]._order:
                self._swap(q, z)
                self._sift_up(z, 2, True)

    def check(self):
        """Assert the full DEAP invariant (test helper, O(S))."""
        a = self._a
        n = len(a) - 1
        for i in range(2, n + 1):
            assert a[i]._pos == i
            if i > 3:
                p = i >> 1
                if self._in_min(i):
                    assert a[p]._order <= a[i]._order
                else:
                    assert a[p]._order >= a[i]._order
            if self._in_min(i):
                j = self._max_partner(i)
                if j:
                    assert a[i]._order <= a[j]._order
