"""Reductions from QBF, CNF, s-t reachability and vertex cover to games, plus fuzzing.

Input formats: QDIMACS for QBF, DIMACS for CNF, and ``p edge n m`` / ``e u v``
graph files with 1-based vertex ids.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from grg.arena import ADAM, EVE, Arena, GameSpec, Player, Profile
from grg.errors import EmptyGraph, InfeasibleParams, ParseError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Qbf:
    """Prenex CNF formula; ``prefix`` lists (quantifier, variable), outermost first."""

    prefix: tuple[tuple[str, int], ...]
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple((q, int(v)) for q, v in self.prefix))
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        seen = set()
        for q, v in self.prefix:
            if q not in ("a", "e"):
                raise ValidationError(f"quantifier must be 'a' or 'e', got {q!r}")
            if v <= 0 or v in seen:
                raise ValidationError(f"bad or repeated variable {v} in prefix")
            seen.add(v)
        for c in self.clauses:
            if not c:
                raise ValidationError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) not in seen:
                    raise ValidationError(f"literal {lit} references no quantified variable")

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(v for _, v in self.prefix)


@dataclass(frozen=True)
class Cnf:
    nvars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for c in self.clauses:
            if not c:
                raise ValidationError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.nvars:
                    raise ValidationError(f"literal {lit} out of range")


@dataclass(frozen=True)
class Graph:
    """Graph on vertices ``0..n-1``; read as directed or undirected by the caller."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValidationError(f"edge ({u}, {v}) out of range")


@dataclass(frozen=True)
class ReductionMeta:
    labels: tuple[str, ...]
    expected_vertices: int
    # combined target index per source clause (qbf/cnf reductions only)
    clause_targets: tuple[int, ...] = ()


# ---------------------------------------------------------------------------
# parsers

def _dimacs_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        tokens = raw.split()
        if not tokens or tokens[0] in ("c", "%"):
            continue
        yield lineno, tokens


def _literals(tokens, lineno) -> list[int]:
    try:
        lits = [int(t) for t in tokens]
    except ValueError:
        raise ParseError("non-integer literal", lineno) from None
    if not lits or lits[-1] != 0:
        raise ParseError("clause must end with 0", lineno)
    if 0 in lits[:-1]:
        raise ParseError("one clause per line", lineno)
    return lits[:-1]


def _clause_lines(text: str, want_prefix: bool):
    header = None
    prefix: list[tuple[str, int]] = []
    clauses: list[tuple[int, ...]] = []
    for lineno, tokens in _dimacs_lines(text):
        if tokens[0] == "p":
            if header is not None:
                raise ParseError("duplicate problem line", lineno)
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise ParseError("expected 'p cnf <vars> <clauses>'", lineno)
            try:
                header = (int(tokens[2]), int(tokens[3]))
            except ValueError:
                raise ParseError("non-integer problem line", lineno) from None
            continue
        if header is None:
            raise ParseError("missing 'p cnf' line", lineno)
        if tokens[0] in ("a", "e"):
            if not want_prefix:
                raise ParseError("quantifier line in a plain CNF file", lineno)
            if clauses:
                raise ParseError("quantifier block after clauses", lineno)
            for v in _literals(tokens[1:], lineno):
                if v <= 0 or v > header[0]:
                    raise ParseError(f"bad quantified variable {v}", lineno)
                prefix.append((tokens[0], v))
            continue
        lits = _literals(tokens, lineno)
        if not lits:
            raise ParseError("empty clause", lineno)
        if any(abs(l) > header[0] for l in lits):
            raise ParseError("literal exceeds declared variable count", lineno)
        clauses.append(tuple(lits))
    if header is None:
        raise ParseError("missing 'p cnf' line")
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return header[0], prefix, clauses


def parse_qdimacs(text: str) -> Qbf:
    """QDIMACS; free variables become outermost existentials."""
    _, prefix, clauses = _clause_lines(text, want_prefix=True)
    bound = {v for _, v in prefix}
    free = sorted({abs(l) for c in clauses for l in c} - bound)
    try:
        return Qbf(tuple(("e", v) for v in free) + tuple(prefix), tuple(clauses))
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def parse_dimacs_cnf(text: str) -> Cnf:
    nvars, _, clauses = _clause_lines(text, want_prefix=False)
    return Cnf(nvars, tuple(clauses))


def parse_edge_graph(text: str) -> Graph:
    """``p edge n m`` followed by ``e u v`` lines, ids 1-based."""
    header = None
    edges = []
    for lineno, tokens in _dimacs_lines(text):
        try:
            if tokens[0] == "p":
                if header is not None or len(tokens) != 4 or tokens[1] != "edge":
                    raise ParseError("expected a single 'p edge <n> <m>' line", lineno)
                header = (int(tokens[2]), int(tokens[3]))
            elif tokens[0] == "e":
                if header is None:
                    raise ParseError("edge before 'p edge' line", lineno)
                if len(tokens) != 3:
                    raise ParseError("expected 'e <u> <v>'", lineno)
                u, v = int(tokens[1]), int(tokens[2])
                if not (1 <= u <= header[0] and 1 <= v <= header[0]):
                    raise ParseError(f"edge ({u}, {v}) out of range", lineno)
                edges.append((u - 1, v - 1))
            else:
                raise ParseError(f"unknown line type {tokens[0]!r}", lineno)
        except ValueError:
            raise ParseError("non-integer field", lineno) from None
    if header is None:
        raise ParseError("missing 'p edge' line")
    if len(edges) != header[1]:
        raise ParseError(f"header declares {header[1]} edges, found {len(edges)}")
    return Graph(header[0], tuple(edges))


# ---------------------------------------------------------------------------
# QBF / CNF

def _clause_targets(clauses, literal_vertex):
    """Route clauses into singleton / large target sets; duplicate units collapse."""
    singletons: list[int] = []
    large: list[frozenset[int]] = []
    index: list[tuple[str, int]] = []
    for c in clauses:
        members = frozenset(literal_vertex(l) for l in c)
        if len(members) == 1:
            (t,) = members
            if t in singletons:
                logger.warning("duplicate unit clause collapsed into one target")
            else:
                singletons.append(t)
            index.append(("s", singletons.index(t)))
        else:
            large.append(members)
            index.append(("l", len(large) - 1))
    combined = tuple(i if kind == "s" else len(singletons) + i for kind, i in index)
    return tuple(singletons), tuple(large), combined


def qbf_to_game(phi: Qbf) -> tuple[GameSpec, ReductionMeta]:
    """Chooser / literal chain game; Eve wins iff ``phi`` is true.

    Variable at prefix position i owns chooser ``3i`` with successors the
    literal vertices ``3i+1`` (positive) and ``3i+2`` (negative), both leading
    to the next chooser; the last literals lead to the self-looping sink ``3n``.
    Every clause becomes the target set of its literal vertices.
    """
    n = len(phi.prefix)
    sink = 3 * n
    owners: list[Player] = []
    succ: list[tuple[int, ...]] = []
    labels: list[str] = []
    position = {}
    for i, (quant, var) in enumerate(phi.prefix):
        player = EVE if quant == "e" else ADAM
        nxt = 3 * (i + 1) if i + 1 < n else sink
        owners += [player, player, player]
        succ += [(3 * i + 1, 3 * i + 2), (nxt,), (nxt,)]
        labels += [f"{'E' if quant == 'e' else 'A'}x{var}", f"x{var}", f"~x{var}"]
        position[var] = i
    owners.append(EVE)
    succ.append((sink,))
    labels.append("sink")

    def literal_vertex(lit):
        return 3 * position[abs(lit)] + (1 if lit > 0 else 2)

    singletons, large, combined = _clause_targets(phi.clauses, literal_vertex)
    arena = Arena(tuple(owners), tuple(succ))
    start = 0 if n else sink
    game = GameSpec(arena, start, singletons, large, tuple(labels))
    return game, ReductionMeta(tuple(labels), 3 * n + 1, combined)


def cnf_to_game(psi: Cnf, owner: Player) -> tuple[GameSpec, ReductionMeta]:
    """Same chain with every vertex owned by ``owner``.

    The MaxGenReach value is the MAX-SAT optimum for Eve and the MIN-SAT
    optimum for Adam.
    """
    quant = "e" if owner is EVE else "a"
    phi = Qbf(tuple((quant, v) for v in range(1, psi.nvars + 1)), psi.clauses)
    game, meta = qbf_to_game(phi)
    arena = game.arena.with_owner(owner)
    return game.with_arena(arena), meta


# ---------------------------------------------------------------------------
# s-t reachability

def streach_to_game(h: Graph, src: int, sink: int) -> tuple[GameSpec, ReductionMeta]:
    """Layered all-Adam game: Adam wins iff ``sink`` is reachable from ``src`` in ``h``.

    Copy (v, i), 1 <= i <= n+1, has id ``(i-1)*n + v``; then TOP and BOT.
    """
    n = h.n
    if not (0 <= src < n and 0 <= sink < n):
        raise ValidationError("source and sink must be vertices of the graph")
    top, bot = n * (n + 1), n * (n + 1) + 1
    out = [[] for _ in range(n)]
    for u, v in h.edges:
        if v not in out[u]:
            out[u].append(v)
    succ: list[tuple[int, ...]] = []
    labels: list[str] = []
    for i in range(1, n + 2):
        for v in range(n):
            nxt = [i * n + w for w in sorted(out[v])] if i <= n else []
            nxt.append(top if v == sink else bot)
            succ.append(tuple(nxt))
            labels.append(f"({v + 1},{i})")
    succ += [(top,), (bot,)]
    labels += ["top", "bot"]
    arena = Arena((ADAM,) * len(succ), tuple(succ))
    game = GameSpec(arena, src, (bot,), (), tuple(labels))
    return game, ReductionMeta(tuple(labels), n * (n + 1) + 2)


# ---------------------------------------------------------------------------
# vertex cover

def vertex_cover_to_game(g: Graph) -> tuple[GameSpec, ReductionMeta]:
    """Eve picks an edge, Adam an endpoint; the value is the minimum vertex cover.

    Vertex ids ``0..n-1`` are the graph vertices (Eve), followed by one Adam
    vertex per distinct edge in sorted order; the start is the first edge.
    """
    edges = sorted({(min(u, v), max(u, v)) for u, v in g.edges})
    if not edges:
        raise EmptyGraph("vertex cover reduction needs at least one edge")
    n = g.n
    edge_ids = tuple(range(n, n + len(edges)))
    succ = [edge_ids] * n + [tuple(sorted({u, v})) for u, v in edges]
    owners = (EVE,) * n + (ADAM,) * len(edges)
    labels = tuple(f"v{v + 1}" for v in range(n)) + tuple(
        f"e{u + 1}-{v + 1}" for u, v in edges)
    game = GameSpec(Arena(owners, tuple(succ)), n, tuple(range(n)), (), labels)
    return game, ReductionMeta(labels, n + len(edges))


# ---------------------------------------------------------------------------
# random instances

_PROFILE_NAMES = {
    "two": Profile.TWO_PLAYER, "two-player": Profile.TWO_PLAYER,
    "eve": Profile.ONLY_EVE, "only-eve": Profile.ONLY_EVE,
    "adam": Profile.ONLY_ADAM, "only-adam": Profile.ONLY_ADAM,
}


def random_game(n: int, m: int | None = None, singletons: int = 0, large_count: int = 0,
                large_size: int = 2, seed: int = 0,
                profile: Profile | str = Profile.TWO_PLAYER) -> GameSpec:
    """Seeded random game; every vertex gets at least one successor.

    ``m`` defaults to ``min(2n, n^2)`` edges.
    """
    if isinstance(profile, str):
        if profile not in _PROFILE_NAMES:
            raise InfeasibleParams(f"unknown profile {profile!r}")
        profile = _PROFILE_NAMES[profile]
    if n < 1:
        raise InfeasibleParams("need at least one vertex")
    if m is None:
        m = min(2 * n, n * n)
    if not n <= m <= n * n:
        raise InfeasibleParams(f"edge count must lie in [{n}, {n * n}]")
    if not 0 <= singletons <= n:
        raise InfeasibleParams("more singleton targets than vertices")
    if large_count < 0 or (large_count and not 2 <= large_size <= n):
        raise InfeasibleParams("large target sets need 2 <= size <= n")
    rng = random.Random(seed)
    succ = [[rng.randrange(n)] for _ in range(n)]
    extra = m - n
    # sample the remaining edges from the unused pairs
    unused = [(u, v) for u in range(n) for v in range(n) if v != succ[u][0]]
    for u, v in rng.sample(unused, extra):
        succ[u].append(v)
    for s in succ:
        s.sort()
    if profile is Profile.ONLY_EVE:
        owners = [EVE] * n
    elif profile is Profile.ONLY_ADAM:
        owners = [ADAM] * n
    else:
        owners = [rng.choice((EVE, ADAM)) for _ in range(n)]
    start = rng.randrange(n)
    ts = rng.sample(range(n), singletons)
    fs = [frozenset(rng.sample(range(n), large_size)) for _ in range(large_count)]
    return GameSpec(Arena(tuple(owners), tuple(map(tuple, succ))), start, tuple(ts), tuple(fs))


def game_from_edges(owners: Sequence[Player | str], edges: Iterable[tuple[int, int]],
                    start: int, singletons=(), large_sets=(), labels=None) -> GameSpec:
    return GameSpec(Arena.from_edges(owners, edges), start, tuple(singletons),
                    tuple(frozenset(f) for f in large_sets), labels)
