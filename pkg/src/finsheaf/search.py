"""Exhaustive enumeration helpers shared by the presheaf, sheaf and names modules."""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Iterator, Sequence, TypeVar

T = TypeVar("T", bound=Hashable)


def closed_subsets(items: Sequence[T], successors: Callable[[T], Iterable[T]]) -> Iterator[frozenset[T]]:
    """Every subset of ``items`` closed under ``successors``.

    Each item's closure is computed once; the enumeration then branches
    include/exclude with full propagation, so no branch is ever abandoned and
    the cost is linear in the number of closed subsets produced.
    """
    items = list(items)
    index = {it: i for i, it in enumerate(items)}
    n = len(items)
    direct = [[index[s] for s in successors(it)] for it in items]
    down = [0] * n
    for i in range(n):
        seen = 1 << i
        stack = [i]
        while stack:
            j = stack.pop()
            for k in direct[j]:
                if not (seen >> k) & 1:
                    seen |= 1 << k
                    stack.append(k)
        down[i] = seen
    up = [0] * n
    for i in range(n):
        m = down[i]
        j = 0
        while m:
            if m & 1:
                up[j] |= 1 << i
            m >>= 1
            j += 1

    def rec(i: int, inc: int, exc: int) -> Iterator[int]:
        decided = inc | exc
        while i < n and (decided >> i) & 1:
            i += 1
        if i == n:
            yield inc
            return
        yield from rec(i + 1, inc, exc | up[i])
        yield from rec(i + 1, inc | down[i], exc)

    for mask in rec(0, 0, 0):
        yield frozenset(items[i] for i in range(n) if (mask >> i) & 1)


def canonical_order(sets: Iterable[frozenset[T]], items: Sequence[T]) -> list[frozenset[T]]:
    """Sort subsets by size, then by the positions of their members in ``items``."""
    pos = {it: i for i, it in enumerate(items)}
    return sorted(sets, key=lambda s: (len(s), sorted(pos[x] for x in s)))


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        # keep the smaller index as root so representatives are order-least
        if ri < rj:
            self.parent[rj] = ri
        elif rj < ri:
            self.parent[ri] = rj
