"""Decision procedures for generalised reachability (does Eve visit every target set?).

Plays count their first vertex as visited: targets containing the start vertex
are satisfied from the outset.  ``start_mask="empty"`` switches the product
solvers to the convention where large sets containing the start vertex are not
seeded into the initial memory.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from grg.arena import ADAM, EVE, GameSpec, Player, Profile, classify, player_profile
from grg.arena import DEFAULT_FPT_CUTOFF
from grg.attractor import Incomparable, attractor_set, check_total_preorder
from grg.errors import MemoryBudget, NoWitness, TooManyTargets, WrongClass

MASK_WIDTH = 64
START_MASKS = ("seeded", "empty")

# rough per-state footprint used to enforce GRG_MEMORY_MB
_FPT_STATE_BYTES = 16
_GENERAL_STATE_BYTES = 400


def memory_limit_mb() -> int:
    return int(os.environ.get("GRG_MEMORY_MB", "1024"))


def _check_budget(states: int, bytes_per_state: int, memory_mb: int | None) -> None:
    limit = memory_limit_mb() if memory_mb is None else memory_mb
    if states * bytes_per_state > limit * 1024 * 1024:
        raise MemoryBudget(
            f"product with {states} states exceeds the {limit} MB budget")


class ProductState(NamedTuple):
    vertex: int
    mask: int


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class VacuousWin:
    kind = "vacuous"

    def summary(self, g, limit=None):
        return "no targets: Eve wins vacuously"

    def as_dict(self, g, limit=None):
        return {"kind": self.kind}


@dataclass(frozen=True)
class ChainOrder:
    """Singleton indices ordered by attractor, largest first.

    Eve visits them in reverse: the target with the smallest attractor first.
    ``insert`` is the chain position i after which the large set is visited
    (one-large solver only): the visit happens on the way from target
    ``order[i]`` (or the start, when i is the chain length) to target
    ``order[i-1]`` (or nowhere, when i == 0).
    """

    order: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]
    insert: int | None = None
    kind = "chain"

    def visit_order(self) -> tuple[int, ...]:
        return self.order[::-1]

    def summary(self, g, limit=None):
        names = [g.label(g.singletons[i]) for i in self.visit_order()]
        text = "visit order: " + (" ".join(names) if names else "(none)")
        if self.insert is not None:
            text += f"; large set visited at chain position {self.insert}"
        return text

    def as_dict(self, g, limit=None):
        return {"kind": self.kind,
                "visit_order": [g.singletons[i] for i in self.visit_order()],
                "insert": self.insert}


@dataclass(frozen=True)
class IncomparabilityWitness:
    """Attractors of singletons ``i`` and ``j`` are incomparable."""

    i: int
    j: int
    only_i: int
    only_j: int
    kind = "incomparable"

    def summary(self, g, limit=None):
        ti, tj = g.singletons[self.i], g.singletons[self.j]
        return (f"attractors of {g.label(ti)} and {g.label(tj)} are incomparable "
                f"({g.label(self.only_i)} only in the first, "
                f"{g.label(self.only_j)} only in the second)")

    def as_dict(self, g, limit=None):
        return {"kind": self.kind, "targets": [g.singletons[self.i], g.singletons[self.j]],
                "only_first": self.only_i, "only_second": self.only_j}


@dataclass(frozen=True)
class MinimalityFailure:
    """The start vertex is outside the smallest singleton attractor."""

    target: int
    kind = "minimality"

    def summary(self, g, limit=None):
        return (f"start {g.label(g.start)} is not in the attractor of "
                f"{g.label(g.singletons[self.target])}")

    def as_dict(self, g, limit=None):
        return {"kind": self.kind, "target": g.singletons[self.target]}


@dataclass(frozen=True)
class LargeSetAvoidance:
    """Chain is fine but no chain position lets Eve detour through the large set."""

    order: tuple[int, ...]
    kind = "large-avoided"

    def summary(self, g, limit=None):
        return "no chain position can be attracted to the large target set"

    def as_dict(self, g, limit=None):
        return {"kind": self.kind, "order": [g.singletons[i] for i in self.order]}


@dataclass(frozen=True)
class Lasso:
    """Play ``prefix + cycle + cycle + ...``; ``cycle[0]`` is the knot."""

    prefix: tuple[int, ...]
    cycle: tuple[int, ...]
    avoided: int | None = None
    kind = "lasso"

    def vertices(self) -> tuple[int, ...]:
        return self.prefix + self.cycle + (self.cycle[0],)

    def visited(self) -> frozenset[int]:
        return frozenset(self.prefix) | frozenset(self.cycle)

    def summary(self, g, limit=50):
        verts = list(self.vertices())
        shown = verts if limit is None else verts[:limit]
        text = "lasso " + " ".join(g.label(v) for v in shown)
        if len(shown) < len(verts):
            text += " ..."
        if self.avoided is not None:
            text += f" avoids target #{self.avoided}"
        return text

    def as_dict(self, g, limit=50):
        return {"kind": self.kind, "prefix": list(self.prefix)[:limit],
                "cycle": list(self.cycle)[:limit], "avoided": self.avoided}


@dataclass(frozen=True)
class AttractorCover:
    """All-Adam game where the start lies in the attractor of every target."""

    kind = "attractor-cover"

    def summary(self, g, limit=None):
        return "start is attracted to every target set"

    def as_dict(self, g, limit=None):
        return {"kind": self.kind}


@dataclass(frozen=True)
class ProductStrategy:
    """Positional strategy of ``player`` on (vertex, visited-mask) states.

    Masks range over all targets in combined order (singletons, then large sets).
    """

    player: Player
    moves: dict[ProductState, ProductState] = field(hash=False)
    kind = "product-strategy"

    def summary(self, g, limit=50):
        items = sorted(self.moves.items())
        shown = items if limit is None else items[:limit]
        parts = [f"({g.label(p.vertex)},{p.mask:b})->{g.label(q.vertex)}" for p, q in shown]
        more = "" if len(shown) == len(items) else f" ... (+{len(items) - len(shown)})"
        return f"{self.player} product strategy, {len(items)} entries: " + " ".join(parts) + more

    def as_dict(self, g, limit=50):
        items = sorted(self.moves.items())
        if limit is not None:
            items = items[:limit]
        return {"kind": self.kind, "player": str(self.player),
                "size": len(self.moves),
                "moves": [[p.vertex, p.mask, q.vertex, q.mask] for p, q in items]}


@dataclass(frozen=True)
class FptStages:
    """Record of the staged product computation.

    ``visit`` lists the singleton representatives in visiting order and
    ``layers`` the sizes of D_n+1, D_n, ..., D_1 (product states).
    """

    visit: tuple[int, ...]
    layers: tuple[int, ...]
    kind = "fpt-stages"

    def summary(self, g, limit=None):
        names = " ".join(g.label(g.singletons[i]) for i in self.visit) or "(none)"
        return f"stages via {names}; layer sizes {list(self.layers)}"

    def as_dict(self, g, limit=None):
        return {"kind": self.kind, "visit": [g.singletons[i] for i in self.visit],
                "layers": list(self.layers)}


@dataclass(frozen=True)
class SolveOutcome:
    winner: Player
    certificate: object
    algorithm: str
    states: int | None = None

    @property
    def eve_wins(self) -> bool:
        return self.winner is EVE


# ---------------------------------------------------------------------------
# helpers

def _singleton_attractors(g: GameSpec) -> list[frozenset[int]]:
    return [attractor_set(g.arena, (t,)) for t in g.singletons]


def _check_start_mask(start_mask: str) -> None:
    if start_mask not in START_MASKS:
        raise ValueError(f"start_mask must be one of {START_MASKS}")


def _chain(g: GameSpec, algorithm: str):
    """Shared chain phase; returns (outcome-or-None, attractors, TotalOrder)."""
    if not g.singletons:
        return None, [], None
    attrs = _singleton_attractors(g)
    check = check_total_preorder(attrs)
    if isinstance(check, Incomparable):
        cert = IncomparabilityWitness(check.i, check.j, check.only_i, check.only_j)
        return SolveOutcome(ADAM, cert, algorithm), attrs, None
    smallest = check.order[-1]
    if g.start not in attrs[smallest]:
        return SolveOutcome(ADAM, MinimalityFailure(smallest), algorithm), attrs, None
    return None, attrs, check


# ---------------------------------------------------------------------------
# all singletons

def solve_singleton_chain(g: GameSpec) -> SolveOutcome:
    """Eve wins iff the singleton attractors form a chain whose least element holds s."""
    if g.large_sets:
        raise WrongClass("chain solver needs all targets singleton")
    if not g.singletons:
        return SolveOutcome(EVE, VacuousWin(), "chain")
    lost, _, check = _chain(g, "chain")
    if lost is not None:
        return lost
    return SolveOutcome(EVE, ChainOrder(check.order, check.groups), "chain")


# ---------------------------------------------------------------------------
# one large set

def solve_one_large(g: GameSpec) -> SolveOutcome:
    """Singleton chain plus one detour through the large set F0.

    With the chain A_1 ⊇ ... ⊇ A_k, t_{k+1} = s and A_0 = V, Eve wins iff
    some t_{i+1} lies in Attr(A_i ∩ F0).
    """
    if len(g.large_sets) != 1:
        raise WrongClass("one-large solver needs exactly one large target set")
    f0 = g.large_sets[0]
    lost, attrs, check = _chain(g, "one-large")
    if lost is not None:
        return lost
    order = check.order if check else ()
    groups = check.groups if check else ()
    k = len(order)
    for i in range(k + 1):
        region = f0 if i == 0 else attrs[order[i - 1]] & f0
        nxt = g.start if i == k else g.singletons[order[i]]
        if region and nxt in attractor_set(g.arena, region):
            return SolveOutcome(EVE, ChainOrder(order, groups, insert=i), "one-large")
    return SolveOutcome(ADAM, LargeSetAvoidance(order), "one-large")


# ---------------------------------------------------------------------------
# FPT product over the large sets

def _subsets(mask: int) -> list[int]:
    subs = []
    sub = mask
    while True:
        subs.append(sub)
        if sub == 0:
            return subs
        sub = (sub - 1) & mask


class _LargeSetProduct:
    """Implicit product V x 2^k with deterministic memory update S' = S | mask(v).

    State (v, S) has index ``S * n + v``.
    """

    def __init__(self, g: GameSpec):
        a = g.arena
        self.n = a.vertex_count
        self.k = len(g.large_sets)
        self.size = self.n << self.k
        self.vmask = g.large_masks()
        self.pred = a.predecessors
        self.eve = [o is EVE for o in a.owner]
        self.outdeg = [len(s) for s in a.successors]
        self.subsets = [_subsets(m) for m in self.vmask]

    def attractor(self, targets) -> bytearray:
        n = self.n
        member = bytearray(self.size)
        remaining = self.outdeg * (1 << self.k)
        stack = []
        for x in targets:
            if not member[x]:
                member[x] = 1
                stack.append(x)
        vmask, pred, eve, subsets = self.vmask, self.pred, self.eve, self.subsets
        pop, push = stack.pop, stack.append
        while stack:
            x = pop()
            mask, w = divmod(x, n)
            mw = vmask[w]
            if mask & mw != mw:
                continue
            base = mask ^ mw
            preds = pred[w]
            for sub in subsets[w]:
                offset = (base | sub) * n
                for v in preds:
                    y = offset + v
                    if member[y]:
                        continue
                    if not eve[v]:
                        remaining[y] -= 1
                        if remaining[y]:
                            continue
                    member[y] = 1
                    push(y)
        return member


def solve_fpt(g: GameSpec, start_mask: str = "seeded",
              memory_mb: int | None = None) -> SolveOutcome:
    """O(m * n * 2^k) solver: singleton chain phase, then staged product attractors."""
    _check_start_mask(start_mask)
    lost, _, check = _chain(g, "fpt")
    if lost is not None:
        return lost
    if g.target_count == 0:
        return SolveOutcome(EVE, VacuousWin(), "fpt")
    n, k = g.arena.vertex_count, len(g.large_sets)
    _check_budget(n << k, _FPT_STATE_BYTES, memory_mb)
    product = _LargeSetProduct(g)
    full = (1 << k) - 1
    # one representative per group of equal attractors, largest attractor first
    reps = [grp[0] for grp in check.groups] if check else []
    layer = [full * n + v for v in range(n)]
    sizes = [len(layer)]
    member = product.attractor(layer)
    for i in reps:
        t = g.singletons[i]
        layer = [S * n + t for S in range(full + 1) if member[S * n + t]]
        sizes.append(len(layer))
        if not layer:
            break
        member = product.attractor(layer)
    s0 = product.vmask[g.start] if start_mask == "seeded" else 0
    won = bool(layer) and bool(member[s0 * n + g.start])
    cert = FptStages(tuple(reversed(reps)), tuple(sizes))
    return SolveOutcome(EVE if won else ADAM, cert, "fpt", states=product.size)


# ---------------------------------------------------------------------------
# general product over all targets

class _ExplicitProduct:
    """Forward-explored product over (vertex, mask of all targets)."""

    def __init__(self, g: GameSpec, start_mask: str = "seeded",
                 memory_mb: int | None = None):
        a = g.arena
        self.game = g
        self.tmask = tm = g.target_masks()
        self.full = (1 << g.target_count) - 1
        s0 = tm[g.start]
        if start_mask == "empty":
            s0 &= (1 << len(g.singletons)) - 1
        limit = memory_limit_mb() if memory_mb is None else memory_mb
        max_states = limit * 1024 * 1024 // _GENERAL_STATE_BYTES
        self.states: list[ProductState] = [ProductState(g.start, s0)]
        self.index = {self.states[0]: 0}
        self.succ: list[list[int]] = []
        i = 0
        while i < len(self.states):
            v, mask = self.states[i]
            out = []
            for w in a.successors[v]:
                q = ProductState(w, mask | tm[w])
                j = self.index.get(q)
                if j is None:
                    j = len(self.states)
                    if j >= max_states:
                        raise MemoryBudget(f"product exceeds the {limit} MB budget")
                    self.index[q] = j
                    self.states.append(q)
                out.append(j)
            self.succ.append(out)
            i += 1
        self.eve = [a.owner[p.vertex] is EVE for p in self.states]
        pred: list[list[int]] = [[] for _ in self.states]
        for i, out in enumerate(self.succ):
            for j in out:
                pred[j].append(i)
        self.pred = pred

    def __len__(self):
        return len(self.states)

    def attractor(self, targets) -> list[int]:
        """Ranks (-1 outside the attractor), by backward counting."""
        rank = [-1] * len(self.states)
        remaining = [len(s) for s in self.succ]
        queue = deque()
        for x in targets:
            if rank[x] < 0:
                rank[x] = 0
                queue.append(x)
        while queue:
            x = queue.popleft()
            r = rank[x] + 1
            for y in self.pred[x]:
                if rank[y] >= 0:
                    continue
                if not self.eve[y]:
                    remaining[y] -= 1
                    if remaining[y]:
                        continue
                rank[y] = r
                queue.append(y)
        return rank

    def eve_moves(self, rank: list[int]) -> dict[ProductState, ProductState]:
        """Eve's rank-decreasing moves on her attractor states (any move at rank 0)."""
        moves = {}
        states = self.states
        for x, r in enumerate(rank):
            if r < 0 or not self.eve[x]:
                continue
            if r == 0:
                cands = self.succ[x]
            else:
                cands = [y for y in self.succ[x] if rank[y] == r - 1]
            moves[states[x]] = min((states[y] for y in cands))
        return moves

    def adam_moves(self, rank: list[int]) -> dict[ProductState, ProductState]:
        """Adam's moves staying outside the attractor."""
        moves = {}
        states = self.states
        for x, r in enumerate(rank):
            if r >= 0 or self.eve[x]:
                continue
            moves[states[x]] = min(states[y] for y in self.succ[x] if rank[y] < 0)
        return moves


def _check_width(g: GameSpec) -> None:
    if g.target_count > MASK_WIDTH:
        raise TooManyTargets(f"{g.target_count} targets exceed mask width {MASK_WIDTH}")


def solve_general(g: GameSpec, start_mask: str = "seeded",
                  memory_mb: int | None = None) -> SolveOutcome:
    """Exponential baseline: attractor to the full-mask layer of the product."""
    _check_start_mask(start_mask)
    _check_width(g)
    if g.target_count == 0:
        return SolveOutcome(EVE, VacuousWin(), "product")
    prod = _ExplicitProduct(g, start_mask, memory_mb)
    rank = prod.attractor(x for x, p in enumerate(prod.states) if p.mask == prod.full)
    if rank[0] >= 0:
        return SolveOutcome(EVE, ProductStrategy(EVE, prod.eve_moves(rank)),
                            "product", states=len(prod))
    return SolveOutcome(ADAM, ProductStrategy(ADAM, prod.adam_moves(rank)),
                        "product", states=len(prod))


# ---------------------------------------------------------------------------
# one-player Adam

def _require_only_adam(g: GameSpec) -> None:
    if player_profile(g.arena) is not Profile.ONLY_ADAM:
        raise WrongClass("solver needs every vertex owned by Adam")


def lasso_witness(g: GameSpec, avoided: int) -> Lasso:
    """Simple lasso from the start that never touches target set ``avoided``."""
    _require_only_adam(g)
    attracted = attractor_set(g.arena, g.targets[avoided])
    if g.start in attracted:
        raise NoWitness(f"every play from the start visits target #{avoided}")
    succ = g.arena.successors
    path = [g.start]
    position = {g.start: 0}
    v = g.start
    while True:
        # outside an all-Adam attractor every vertex keeps a successor outside it
        v = min(w for w in succ[v] if w not in attracted)
        if v in position:
            cut = position[v]
            return Lasso(tuple(path[:cut]), tuple(path[cut:]), avoided)
        position[v] = len(path)
        path.append(v)


def solve_one_player_adam(g: GameSpec) -> SolveOutcome:
    """Adam wins iff the start escapes the attractor of some target set."""
    _require_only_adam(g)
    if g.target_count == 0:
        return SolveOutcome(EVE, VacuousWin(), "adam")
    for i, f in enumerate(g.targets):
        if g.start not in attractor_set(g.arena, f):
            return SolveOutcome(ADAM, lasso_witness(g, i), "adam")
    return SolveOutcome(EVE, AttractorCover(), "adam")


# ---------------------------------------------------------------------------
# dispatch

SOLVERS = {
    "product": solve_general,
    "chain": solve_singleton_chain,
    "one-large": solve_one_large,
    "fpt": solve_fpt,
    "adam": solve_one_player_adam,
}


def choose_algorithm(g: GameSpec, start_mask: str = "seeded",
                     fpt_cutoff: int = DEFAULT_FPT_CUTOFF) -> str:
    cls = classify(g, fpt_cutoff)
    k = cls.large_count
    if start_mask == "empty" and k:
        # the attractor criteria below count the start vertex as visited
        return "fpt" if k <= fpt_cutoff else "product"
    if cls.profile is Profile.ONLY_ADAM:
        return "adam"
    if k == 0:
        return "chain"
    if k == 1:
        return "one-large"
    if k <= fpt_cutoff:
        return "fpt"
    return "product"


def solve(g: GameSpec, algo: str = "auto", start_mask: str = "seeded",
          fpt_cutoff: int = DEFAULT_FPT_CUTOFF, memory_mb: int | None = None) -> SolveOutcome:
    _check_start_mask(start_mask)
    if algo == "auto":
        algo = choose_algorithm(g, start_mask, fpt_cutoff)
    if algo not in SOLVERS:
        raise ValueError(f"unknown algorithm {algo!r}")
    if algo in ("fpt", "product"):
        return SOLVERS[algo](g, start_mask=start_mask, memory_mb=memory_mb)
    if start_mask == "empty" and g.large_sets:
        raise WrongClass(f"{algo} solver does not support an empty start mask")
    return SOLVERS[algo](g)
