"""Brute-force ground truth for small instances.

Nothing here uses attractors, SCCs or the solver modules; the only shared
code is the arena model.  Everything is exponential and meant for tiny games.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass
from typing import Mapping

from grg.arena import ADAM, EVE, GameSpec, Player
from grg.errors import BudgetExceeded, PartialStrategy, TooLarge, TooManyVariables


@dataclass(frozen=True)
class OracleBudget:
    max_vertices: int = 14
    max_targets: int = 6
    # None means (targets + 1) * vertices: a new target set, when Eve can
    # force one at all, is forced within n steps
    max_depth: int | None = None

    def depth_for(self, g: GameSpec) -> int:
        n = g.arena.vertex_count
        if self.max_depth is None:
            return (g.target_count + 1) * n
        if self.max_depth < n:
            raise ValueError("oracle depth bound must be at least the vertex count")
        return self.max_depth

    def check(self, g: GameSpec) -> None:
        if g.arena.vertex_count > self.max_vertices:
            raise BudgetExceeded(
                f"{g.arena.vertex_count} vertices > oracle budget {self.max_vertices}")
        if g.target_count > self.max_targets:
            raise BudgetExceeded(
                f"{g.target_count} targets > oracle budget {self.max_targets}")


DEFAULT_BUDGET = OracleBudget()


def _initial_mask(g: GameSpec, masks: list[int], start_mask: str) -> int:
    m0 = masks[g.start]
    if start_mask == "empty":
        m0 &= (1 << len(g.singletons)) - 1
    return m0


def _vertex_masks(g: GameSpec) -> list[int]:
    masks = [0] * g.arena.vertex_count
    for i, f in enumerate(g.targets):
        for v in f:
            masks[v] |= 1 << i
    return masks


def oracle_max(g: GameSpec, budget: OracleBudget = DEFAULT_BUDGET,
               start_mask: str = "seeded") -> int:
    """Max number of target sets Eve can guarantee, by depth-bounded minimax."""
    budget.check(g)
    k = g.target_count
    full = (1 << k) - 1
    masks = _vertex_masks(g)
    succ = g.arena.successors
    eve = [o is EVE for o in g.arena.owner]
    memo: dict[tuple[int, int, int], int] = {}

    def value(v: int, mask: int, depth: int) -> int:
        have = bin(mask).count("1")
        if mask == full or depth == 0:
            return have
        key = (v, mask, depth)
        if key in memo:
            return memo[key]
        if eve[v]:
            best = -1
            for w in succ[v]:
                best = max(best, value(w, mask | masks[w], depth - 1))
                if best == k:
                    break
        else:
            best = k + 1
            for w in succ[v]:
                best = min(best, value(w, mask | masks[w], depth - 1))
                if best == have:
                    break
        memo[key] = best
        return best

    depth = budget.depth_for(g)
    with _recursion(depth):
        return value(g.start, _initial_mask(g, masks, start_mask), depth)


def oracle_genreach(g: GameSpec, budget: OracleBudget = DEFAULT_BUDGET,
                    start_mask: str = "seeded") -> Player:
    """Winner of the all-targets objective (Eve iff oracle_max hits every set)."""
    budget.check(g)
    full = (1 << g.target_count) - 1
    masks = _vertex_masks(g)
    succ = g.arena.successors
    eve = [o is EVE for o in g.arena.owner]
    memo: dict[tuple[int, int, int], bool] = {}

    def wins(v: int, mask: int, depth: int) -> bool:
        if mask == full:
            return True
        if depth == 0:
            return False
        key = (v, mask, depth)
        if key not in memo:
            moves = (wins(w, mask | masks[w], depth - 1) for w in succ[v])
            memo[key] = any(moves) if eve[v] else all(moves)
        return memo[key]

    depth = budget.depth_for(g)
    with _recursion(depth):
        return EVE if wins(g.start, _initial_mask(g, masks, start_mask), depth) else ADAM


def oracle_promise(g: GameSpec, budget: OracleBudget = DEFAULT_BUDGET) -> int:
    """Largest set of targets Eve can promise, by trying every subset."""
    budget.check(g)
    best = 0
    k = g.target_count
    for r in range(k + 1):
        for subset in itertools.combinations(range(k), r):
            if oracle_genreach(g.restrict(subset), budget) is EVE:
                best = max(best, r)
    return best


class _recursion:
    """Temporarily raise the interpreter recursion limit for deep minimax."""

    def __init__(self, depth: int):
        self.need = 4 * depth + 200

    def __enter__(self):
        self.old = sys.getrecursionlimit()
        if self.need > self.old:
            sys.setrecursionlimit(self.need)

    def __exit__(self, *exc):
        sys.setrecursionlimit(self.old)


# ---------------------------------------------------------------------------
# strategy validation

def _successor_vertex(move) -> int:
    return move[0] if isinstance(move, tuple) else move


def strategy_check(g: GameSpec, eve_strategy: Mapping, start_mask: str = "seeded") -> int:
    """Fewest target sets Adam can hold Eve to while she follows ``eve_strategy``.

    ``eve_strategy`` maps (vertex, mask) pairs to a successor vertex or a
    successor (vertex, mask) pair.  Masks range over all targets.
    """
    masks = _vertex_masks(g)
    succ = g.arena.successors
    eve = [o is EVE for o in g.arena.owner]
    start = (g.start, _initial_mask(g, masks, start_mask))
    edges: dict[tuple[int, int], list[tuple[int, int]]] = {}
    todo = [start]
    while todo:
        state = todo.pop()
        if state in edges:
            continue
        v, mask = state
        if eve[v]:
            if state not in eve_strategy:
                raise PartialStrategy(f"no move for Eve at {state}")
            w = _successor_vertex(eve_strategy[state])
            if w not in succ[v]:
                raise PartialStrategy(f"illegal move {v}->{w}")
            nxt = [w]
        else:
            nxt = succ[v]
        edges[state] = [(w, mask | masks[w]) for w in nxt]
        todo.extend(edges[state])
    return min(bin(state[1]).count("1") for state in edges if _on_cycle(state, edges))


def counter_strategy_check(g: GameSpec, adam_strategy: Mapping,
                           start_mask: str = "seeded") -> int:
    """Most target sets Eve can collect while Adam follows ``adam_strategy``."""
    masks = _vertex_masks(g)
    succ = g.arena.successors
    eve = [o is EVE for o in g.arena.owner]
    start = (g.start, _initial_mask(g, masks, start_mask))
    seen = {start}
    todo = [start]
    while todo:
        v, mask = todo.pop()
        if eve[v]:
            nxt = succ[v]
        else:
            if (v, mask) not in adam_strategy:
                raise PartialStrategy(f"no move for Adam at {(v, mask)}")
            w = _successor_vertex(adam_strategy[(v, mask)])
            if w not in succ[v]:
                raise PartialStrategy(f"illegal move {v}->{w}")
            nxt = [w]
        for w in nxt:
            q = (w, mask | masks[w])
            if q not in seen:
                seen.add(q)
                todo.append(q)
    # masks only grow, so Eve can park in any reachable state's mask
    return max(bin(mask).count("1") for _, mask in seen)


def _on_cycle(state, edges) -> bool:
    seen = set()
    todo = list(edges[state])
    while todo:
        x = todo.pop()
        if x == state:
            return True
        if x not in seen:
            seen.add(x)
            todo.extend(edges[x])
    return False


# ---------------------------------------------------------------------------
# reference evaluators for reduction sources

def qbf_eval(phi) -> bool:
    """Truth of a prenex QBF by full quantifier expansion.

    ``phi.prefix`` is a sequence of (quantifier, variable) with quantifier
    ``"a"`` or ``"e"``; ``phi.clauses`` a sequence of signed-literal tuples.
    """
    prefix = list(phi.prefix)
    if len(prefix) > 24:
        raise TooManyVariables(f"{len(prefix)} variables > 24")
    clauses = [tuple(c) for c in phi.clauses]
    value: dict[int, bool] = {}

    def matrix() -> bool:
        return all(any(value[abs(l)] == (l > 0) for l in c) for c in clauses)

    def expand(i: int) -> bool:
        if i == len(prefix):
            return matrix()
        quant, var = prefix[i]
        results = []
        for b in (False, True):
            value[var] = b
            results.append(expand(i + 1))
        return any(results) if quant == "e" else all(results)

    return expand(0)


def _satisfied_counts(nvars: int, clauses):
    for bits in itertools.product((False, True), repeat=nvars):
        yield sum(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses)


def max_sat(nvars: int, clauses) -> int:
    return max(_satisfied_counts(nvars, clauses))


def min_sat(nvars: int, clauses) -> int:
    return min(_satisfied_counts(nvars, clauses))


def min_vertex_cover(n: int, edges) -> int:
    """Exact minimum vertex cover by subset enumeration (n <= 20)."""
    if n > 20:
        raise TooLarge(f"{n} vertices > 20")
    edges = [tuple(e) for e in edges]
    for size in range(n + 1):
        for cover in itertools.combinations(range(n), size):
            chosen = set(cover)
            if all(u in chosen or v in chosen for u, v in edges):
                return size
    return n
