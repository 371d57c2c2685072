"""Eve-attractors with ranks and witnessing moves, and the total-preorder test."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from grg.arena import EVE, Arena


@dataclass(frozen=True)
class AttractorResult:
    """``member`` is Attr_Eve(S); ``rank[v]`` is the least i with v in Attr^i(S).

    ``move`` maps every Eve vertex of ``member`` outside S to a successor one
    rank closer to S (smallest id among the candidates).
    """

    member: frozenset[int]
    rank: dict[int, int]
    move: dict[int, int]

    def __contains__(self, v: int) -> bool:
        return v in self.member


def attractor(a: Arena, S: Iterable[int]) -> AttractorResult:
    """Backward counting fixpoint, O(n + m).

    Vertices are discovered in non-decreasing rank order (FIFO), so the rank
    of an Eve vertex is one more than its first attracted successor and the
    rank of an Adam vertex one more than its last.
    """
    succ = a.successors
    pred = a.predecessors
    owner = a.owner
    rank: dict[int, int] = {}
    queue: deque[int] = deque()
    for v in S:
        if v not in rank:
            rank[v] = 0
            queue.append(v)
    remaining = [len(s) for s in succ]
    while queue:
        w = queue.popleft()
        r = rank[w] + 1
        for v in pred[w]:
            if v in rank:
                continue
            if owner[v] is EVE:
                rank[v] = r
                queue.append(v)
            else:
                remaining[v] -= 1
                if remaining[v] == 0:
                    rank[v] = r
                    queue.append(v)
    move: dict[int, int] = {}
    for v, r in rank.items():
        if r > 0 and owner[v] is EVE:
            move[v] = min(w for w in succ[v] if rank.get(w) == r - 1)
    return AttractorResult(frozenset(rank), rank, move)


def attractor_set(a: Arena, S: Iterable[int]) -> frozenset[int]:
    """Membership only; same fixpoint as :func:`attractor` without ranks."""
    pred = a.predecessors
    owner = a.owner
    member = set(S)
    stack = list(member)
    remaining = [len(s) for s in a.successors]
    while stack:
        w = stack.pop()
        for v in pred[w]:
            if v in member:
                continue
            if owner[v] is not EVE:
                remaining[v] -= 1
                if remaining[v]:
                    continue
            member.add(v)
            stack.append(v)
    return frozenset(member)


@dataclass(frozen=True)
class TotalOrder:
    """Indices ordered so that the sets form a chain, largest first.

    ``groups`` partitions ``order`` into runs of equal sets.
    """

    order: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]

    is_total = True


@dataclass(frozen=True)
class Incomparable:
    """``sets[i]`` and ``sets[j]`` (i < j) are not related by inclusion.

    ``only_i`` lies in sets[i] but not sets[j]; ``only_j`` the other way round.
    """

    i: int
    j: int
    only_i: int
    only_j: int

    is_total = False


PreorderCheck = TotalOrder | Incomparable


def check_total_preorder(sets: Sequence[Iterable[int]]) -> PreorderCheck:
    frozen = [frozenset(s) for s in sets]
    # size-descending order is inclusion-compatible iff a chain exists
    order = sorted(range(len(frozen)), key=lambda i: (-len(frozen[i]), sorted(frozen[i]), i))
    groups: list[list[int]] = []
    for pos, i in enumerate(order):
        if pos == 0:
            groups.append([i])
            continue
        prev = order[pos - 1]
        bigger, smaller = frozen[prev], frozen[i]
        if smaller == bigger:
            groups[-1].append(i)
        elif smaller < bigger:
            groups.append([i])
        else:
            lo, hi = min(prev, i), max(prev, i)
            return Incomparable(lo, hi, min(frozen[lo] - frozen[hi]),
                                min(frozen[hi] - frozen[lo]))
    return TotalOrder(tuple(order), tuple(tuple(g) for g in groups))
