"""Optimisation variants: how many target sets can Eve guarantee?

``max_*`` solvers compute the MaxGenReach value (visit as many sets as
possible); ``promise_*`` solvers the MaxGenReachPromise value (name a family of
sets up front and visit all of them).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from grg.arena import GameSpec, Profile, player_profile, scc_decompose, tarjan
from grg.attractor import attractor_set
from grg.errors import WrongClass
from grg.genreach import (
    Lasso, ProductState, _check_width, _ExplicitProduct, solve,
)


@dataclass(frozen=True)
class PromisedSubset:
    targets: tuple[int, ...]          # combined target indices
    kind = "promise"

    def summary(self, g, limit=None):
        return "promised {" + ", ".join(_target_name(g, i) for i in self.targets) + "}"

    def as_dict(self, g, limit=None):
        return {"kind": self.kind, "targets": list(self.targets),
                "names": [_target_name(g, i) for i in self.targets]}


@dataclass(frozen=True)
class SccPath:
    components: tuple[int, ...]
    weights: tuple[int, ...]
    kind = "scc-path"

    def summary(self, g, limit=None):
        return "scc path weights " + "+".join(map(str, self.weights))

    def as_dict(self, g, limit=None):
        return {"kind": self.kind, "components": list(self.components),
                "weights": list(self.weights)}


@dataclass(frozen=True)
class LassoWitness:
    lasso: Lasso
    count: int
    kind = "lasso-count"

    def summary(self, g, limit=50):
        return f"{self.lasso.summary(g, limit)} hits {self.count} target sets"

    def as_dict(self, g, limit=50):
        d = self.lasso.as_dict(g, limit)
        d.update(kind=self.kind, count=self.count)
        return d


@dataclass(frozen=True)
class ProductValue:
    values: dict[ProductState, int] = field(hash=False)
    kind = "product-value"

    def summary(self, g, limit=None):
        return f"values over {len(self.values)} product states"

    def as_dict(self, g, limit=50):
        items = sorted(self.values.items())
        if limit is not None:
            items = items[:limit]
        return {"kind": self.kind, "size": len(self.values),
                "values": [[p.vertex, p.mask, v] for p, v in items]}


@dataclass(frozen=True)
class ValueResult:
    value: int
    witness: object
    algorithm: str
    states: int | None = None
    # Eve product strategy guaranteeing ``value`` (general solver only)
    strategy: dict | None = field(default=None, hash=False, compare=False)


def _target_name(g: GameSpec, i: int) -> str:
    f = g.targets[i]
    if len(f) == 1:
        return g.label(next(iter(f)))
    return "{" + ",".join(g.label(v) for v in sorted(f)) + "}"


def _require(g: GameSpec, profile: Profile | None = None, singletons_only=False) -> None:
    if profile is not None and player_profile(g.arena) is not profile:
        raise WrongClass(f"solver needs a {profile.value} game")
    if singletons_only and g.large_sets:
        raise WrongClass("solver needs all targets singleton")


def _popcount(x: int) -> int:
    return bin(x).count("1")


# ---------------------------------------------------------------------------
# MaxGenReach

def max_value_general(g: GameSpec, memory_mb: int | None = None) -> ValueResult:
    """Product value by threshold attractors.

    For each threshold v, W_v is the attractor of the product states that have
    already visited >= v target sets; masks only grow, so reaching W_v's
    target means the play ends with >= v sets.  The value of a state is the
    largest v with the state in W_v.
    """
    _check_width(g)
    k = g.target_count
    if k == 0:
        return ValueResult(0, None, "product")
    prod = _ExplicitProduct(g, memory_mb=memory_mb)
    states = prod.states
    counts = [_popcount(p.mask) for p in states]
    value = counts[:]
    ranks: dict[int, list[int]] = {}
    for v in range(k, 0, -1):
        rank = prod.attractor(x for x, c in enumerate(counts) if c >= v)
        ranks[v] = rank
        for x, r in enumerate(rank):
            if r >= 0 and value[x] < v:
                value[x] = v
    # positional Eve strategy: head for the layer her value promises
    moves = {}
    for x, p in enumerate(states):
        if not prod.eve[x]:
            continue
        v = value[x]
        if v > counts[x]:
            r = ranks[v][x]
            cands = [y for y in prod.succ[x] if ranks[v][y] == r - 1]
        else:
            cands = prod.succ[x]
        moves[p] = min(states[y] for y in cands)
    values = {p: value[x] for x, p in enumerate(states)}
    return ValueResult(value[0], ProductValue(values), "product", len(states), moves)


def max_value_eve_scc(g: GameSpec) -> ValueResult:
    """All-Eve, singletons: heaviest path in the SCC DAG from the start's component."""
    _require(g, Profile.ONLY_EVE, singletons_only=True)
    dag = scc_decompose(g.arena)
    weight = [0] * len(dag.components)
    for t in g.singletons:
        weight[dag.component_of[t]] += 1
    best = [0] * len(weight)
    nxt = [-1] * len(weight)
    # components are sinks first, so successors are finished before use
    for c in range(len(weight)):
        tail, arg = 0, -1
        for d in sorted(dag.dag_edges[c]):
            if best[d] > tail:
                tail, arg = best[d], d
        best[c] = weight[c] + tail
        nxt[c] = arg
    path = []
    c = dag.component_of[g.start]
    while c != -1:
        path.append(c)
        c = nxt[c]
    return ValueResult(best[dag.component_of[g.start]],
                       SccPath(tuple(path), tuple(weight[c] for c in path)), "eve-scc")


def _zero_one_bfs(succ, sources, weight):
    """Distances and parents under 0/1 vertex-entry weights."""
    n = len(succ)
    dist = [None] * n
    parent = [-1] * n
    dq = deque()
    for s, d0 in sources:
        if dist[s] is None or d0 < dist[s]:
            dist[s] = d0
            dq.appendleft(s) if d0 == 0 else dq.append(s)
    done = [False] * n
    while dq:
        u = dq.popleft()
        if done[u]:
            continue
        done[u] = True
        for v in succ[u]:
            nd = dist[u] + weight[v]
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                if weight[v]:
                    dq.append(v)
                else:
                    dq.appendleft(v)
    return dist, parent


def _walk(parent, src, dst):
    path = [dst]
    while path[-1] != src:
        path.append(parent[path[-1]])
    return path[::-1]


def max_value_adam_lasso(g: GameSpec) -> ValueResult:
    """All-Adam, singletons: lightest s->t->t lasso under 0/1 target weights.

    value = min over knots t of [s in T] + d(s, t) + cycle(t) - [t in T],
    where every edge costs 1 when it enters a target vertex.
    """
    _require(g, Profile.ONLY_ADAM, singletons_only=True)
    succ = g.arena.successors
    n = g.arena.vertex_count
    weight = [0] * n
    for t in g.singletons:
        weight[t] = 1
    s = g.start
    dist, parent = _zero_one_bfs(succ, [(s, 0)], weight)
    best = None
    for t in range(n):
        if dist[t] is None:
            continue
        # lightest cycle through t: leave t, come back to t
        back, back_parent = _zero_one_bfs(succ, [(w, weight[w]) for w in succ[t]], weight)
        if back[t] is None:
            continue
        total = weight[s] + dist[t] + back[t] - weight[t]
        if best is None or total < best[0]:
            best = (total, t, back_parent)
    total, t, back_parent = best
    prefix = _walk(parent, s, t)[:-1]
    cycle = _cycle_from(back_parent, t)
    lasso = Lasso(tuple(prefix), tuple(cycle))
    count = sum(weight[v] for v in lasso.visited())
    return ValueResult(total, LassoWitness(lasso, count), "adam-lasso")


def _cycle_from(back_parent, t):
    """Cycle t -> ... -> t recorded by a search seeded at Succ(t), knot first.

    Search roots keep parent -1; a self-loop makes t its own root.
    """
    rev = []
    v = back_parent[t]
    while v != -1:
        rev.append(v)
        v = back_parent[v]
    return [t] + rev[::-1]


def max_value_adam_general(g: GameSpec, memory_mb: int | None = None) -> ValueResult:
    """All-Adam: cheapest reachable cycle in the product over visited masks."""
    _require(g, Profile.ONLY_ADAM)
    _check_width(g)
    prod = _ExplicitProduct(g, memory_mb=memory_mb)
    comps = tarjan(len(prod), prod.succ)
    best = None
    for comp in comps:
        x = comp[0]
        cyclic = len(comp) > 1 or x in prod.succ[x]
        if not cyclic:
            continue
        # masks are constant inside a product SCC
        c = _popcount(prod.states[x].mask)
        if best is None or c < best[0]:
            best = (c, x, frozenset(comp))
    count, knot, comp = best
    lasso = _product_lasso(prod, knot, comp)
    return ValueResult(count, LassoWitness(lasso, count), "adam-product", len(prod))


def _product_lasso(prod, knot, comp) -> Lasso:
    # BFS path from the start state to the knot, then a cycle inside its SCC
    parent = {0: None}
    todo = deque([0])
    while todo:
        x = todo.popleft()
        if x == knot:
            break
        for y in prod.succ[x]:
            if y not in parent:
                parent[y] = x
                todo.append(y)
    prefix = []
    x = parent[knot]
    while x is not None:
        prefix.append(prod.states[x].vertex)
        x = parent[x]
    prefix.reverse()
    back = {}
    todo = deque()
    for y in prod.succ[knot]:
        if y in comp and y not in back:
            back[y] = None
            todo.append(y)
    while todo and knot not in back:
        x = todo.popleft()
        for y in prod.succ[x]:
            if y in comp and y not in back:
                back[y] = x
                todo.append(y)
    cycle = []
    x = back[knot]
    while x is not None:
        cycle.append(prod.states[x].vertex)
        x = back[x]
    cycle.append(prod.states[knot].vertex)
    cycle.reverse()
    return Lasso(tuple(prefix), tuple(cycle))


# ---------------------------------------------------------------------------
# MaxGenReachPromise

def promise_value_adam(g: GameSpec) -> ValueResult:
    """All-Adam: promise exactly the targets whose attractor contains the start."""
    _require(g, Profile.ONLY_ADAM)
    chosen = tuple(i for i, f in enumerate(g.targets)
                   if g.start in attractor_set(g.arena, f))
    return ValueResult(len(chosen), PromisedSubset(chosen), "adam")


@dataclass(frozen=True)
class TargetPreorderGraph:
    """Node 0 is the start vertex, nodes 1.. the singleton targets other than it.

    Edge i -> j iff node i lies in the attractor of node j.  ``weight[i]`` is 1
    for target nodes (node 0 too when the start is itself a target).
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, ...], ...]
    weight: tuple[int, ...]
    target_index: tuple[int | None, ...]


def target_preorder_graph(g: GameSpec) -> TargetPreorderGraph:
    tindex = {t: i for i, t in enumerate(g.singletons)}
    nodes = [g.start] + [t for t in g.singletons if t != g.start]
    attrs = [attractor_set(g.arena, (v,)) for v in nodes]
    edges = tuple(tuple(j for j in range(len(nodes)) if j != i and nodes[i] in attrs[j])
                  for i in range(len(nodes)))
    weight = tuple(1 if v in tindex else 0 for v in nodes)
    return TargetPreorderGraph(tuple(nodes), edges, weight,
                               tuple(tindex.get(v) for v in nodes))


def promise_value_singleton(g: GameSpec) -> ValueResult:
    """Heaviest path from the start's component in the SCC DAG of the preorder graph."""
    _require(g, singletons_only=True)
    pg = target_preorder_graph(g)
    comps = tarjan(len(pg.vertices), pg.edges)
    comp_of = {}
    for c, comp in enumerate(comps):
        for x in comp:
            comp_of[x] = c
    weight = [sum(pg.weight[x] for x in comp) for comp in comps]
    best = [0] * len(comps)
    nxt = [-1] * len(comps)
    for c, comp in enumerate(comps):
        succs = sorted({comp_of[y] for x in comp for y in pg.edges[x]} - {c})
        tail, arg = 0, -1
        for d in succs:
            if best[d] > tail:
                tail, arg = best[d], d
        best[c] = weight[c] + tail
        nxt[c] = arg
    chosen = []
    c = comp_of[0]
    while c != -1:
        chosen.extend(pg.target_index[x] for x in comps[c] if pg.target_index[x] is not None)
        c = nxt[c]
    return ValueResult(best[comp_of[0]], PromisedSubset(tuple(sorted(chosen))), "singleton")


def promise_value_general(g: GameSpec, memory_mb: int | None = None) -> ValueResult:
    """Largest family of targets Eve can promise, by guided subset search.

    Subsets are tried by decreasing size, lexicographically within a size; the
    first win is optimal.  Targets Eve cannot win on their own are dropped
    first, since a losing family makes every superset lose.
    """
    _check_width(g)
    k = g.target_count

    def wins(subset) -> bool:
        return solve(g.restrict(subset), memory_mb=memory_mb).eve_wins

    viable = [i for i in range(k) if wins((i,))]
    losing: list[frozenset[int]] = []
    for r in range(len(viable), 0, -1):
        for subset in itertools.combinations(viable, r):
            if any(lost <= set(subset) for lost in losing):
                continue
            if r == 1 or wins(subset):
                return ValueResult(r, PromisedSubset(subset), "subsets")
            losing.append(frozenset(subset))
    return ValueResult(0, PromisedSubset(()), "subsets")


# ---------------------------------------------------------------------------
# dispatch

MAX_SOLVERS = {
    "product": max_value_general,
    "eve-scc": max_value_eve_scc,
    "adam-lasso": max_value_adam_lasso,
    "adam-product": max_value_adam_general,
}

PROMISE_SOLVERS = {
    "subsets": promise_value_general,
    "singleton": promise_value_singleton,
    "adam": promise_value_adam,
}


def choose_max_algorithm(g: GameSpec) -> str:
    profile = player_profile(g.arena)
    if profile is Profile.ONLY_EVE and not g.large_sets:
        return "eve-scc"
    if profile is Profile.ONLY_ADAM:
        return "adam-product" if g.large_sets else "adam-lasso"
    return "product"


def choose_promise_algorithm(g: GameSpec) -> str:
    if player_profile(g.arena) is Profile.ONLY_ADAM:
        return "adam"
    if not g.large_sets:
        return "singleton"
    return "subsets"


def max_value(g: GameSpec, algo: str = "auto", memory_mb: int | None = None) -> ValueResult:
    if algo == "auto":
        algo = choose_max_algorithm(g)
    if algo not in MAX_SOLVERS:
        raise ValueError(f"unknown algorithm {algo!r}")
    if algo in ("product", "adam-product"):
        return MAX_SOLVERS[algo](g, memory_mb=memory_mb)
    return MAX_SOLVERS[algo](g)


def promise_value(g: GameSpec, algo: str = "auto", memory_mb: int | None = None) -> ValueResult:
    if algo == "auto":
        algo = choose_promise_algorithm(g)
    if algo not in PROMISE_SOLVERS:
        raise ValueError(f"unknown algorithm {algo!r}")
    if algo == "subsets":
        return promise_value_general(g, memory_mb=memory_mb)
    return PROMISE_SOLVERS[algo](g)
