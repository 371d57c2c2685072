"""Game arenas, generalised reachability instances and the ``grg 1`` text format.

A game is an arena (directed graph plus vertex ownership), a start vertex and a
family of target sets.  Targets are split into singletons ``T`` and large sets
``F`` (size >= 2).  Whenever targets are indexed as a single sequence, the
singletons come first, in order, followed by the large sets.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from grg.errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

FORMAT_HEADER = "grg 1"


class Player(enum.Enum):
    EVE = "E"
    ADAM = "A"

    @property
    def opponent(self) -> "Player":
        return Player.ADAM if self is Player.EVE else Player.EVE

    def __str__(self) -> str:
        return self.name.lower()


EVE = Player.EVE
ADAM = Player.ADAM


@dataclass(frozen=True)
class Arena:
    """Directed graph over vertices ``0..n-1`` with an owner per vertex."""

    owner: tuple[Player, ...]
    successors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "owner", tuple(self.owner))
        object.__setattr__(self, "successors", tuple(tuple(s) for s in self.successors))
        n = len(self.owner)
        if len(self.successors) != n:
            raise ValidationError(
                f"{n} owners but {len(self.successors)} successor lists")
        for v, succ in enumerate(self.successors):
            if not isinstance(self.owner[v], Player):
                raise ValidationError(f"vertex {v}: owner must be a Player")
            if not succ:
                raise ValidationError(f"vertex {v} has no successors")
            if len(set(succ)) != len(succ):
                raise ValidationError(f"vertex {v} has duplicate successors")
            for w in succ:
                if not 0 <= w < n:
                    raise ValidationError(f"vertex {v}: successor {w} is not a vertex")

    @classmethod
    def from_edges(cls, owners: Sequence[Player | str],
                   edges: Iterable[tuple[int, int]]) -> "Arena":
        owners = [o if isinstance(o, Player) else Player(o) for o in owners]
        succ: list[list[int]] = [[] for _ in owners]
        for u, v in edges:
            if not 0 <= u < len(owners):
                raise ValidationError(f"edge source {u} is not a vertex")
            if v not in succ[u]:
                succ[u].append(v)
        return cls(tuple(owners), tuple(tuple(s) for s in succ))

    @property
    def vertex_count(self) -> int:
        return len(self.owner)

    n = vertex_count

    @cached_property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.successors)

    @property
    def m(self) -> int:
        return self.edge_count

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        pred: list[list[int]] = [[] for _ in self.owner]
        for u, succ in enumerate(self.successors):
            for v in succ:
                pred[v].append(u)
        return tuple(tuple(p) for p in pred)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, succ in enumerate(self.successors) for v in succ]

    def is_eve(self, v: int) -> bool:
        return self.owner[v] is EVE

    def with_owner(self, player: Player) -> "Arena":
        """Same graph with every vertex handed to ``player``."""
        return Arena((player,) * self.vertex_count, self.successors)


@dataclass(frozen=True)
class GameSpec:
    arena: Arena
    start: int
    singletons: tuple[int, ...] = ()
    large_sets: tuple[frozenset[int], ...] = ()
    # vertex names carried through serialisation comments; ignored by equality
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        n = self.arena.vertex_count
        object.__setattr__(self, "singletons", tuple(self.singletons))
        object.__setattr__(self, "large_sets",
                           tuple(frozenset(f) for f in self.large_sets))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != n:
                raise ValidationError("one label per vertex required")
        if not 0 <= self.start < n:
            raise ValidationError(f"start {self.start} is not a vertex")
        if len(set(self.singletons)) != len(self.singletons):
            raise ValidationError("duplicate singleton target")
        for t in self.singletons:
            if not 0 <= t < n:
                raise ValidationError(f"singleton target {t} is not a vertex")
        for f in self.large_sets:
            if len(f) < 2:
                raise ValidationError("large target sets need at least two vertices")
            for t in f:
                if not 0 <= t < n:
                    raise ValidationError(f"target member {t} is not a vertex")

    @property
    def target_count(self) -> int:
        return len(self.singletons) + len(self.large_sets)

    @property
    def targets(self) -> tuple[frozenset[int], ...]:
        """All target sets: singletons first, then large sets."""
        return tuple(frozenset((t,)) for t in self.singletons) + self.large_sets

    def target_masks(self) -> list[int]:
        """Bitmask per vertex of the target indices containing it."""
        masks = [0] * self.arena.vertex_count
        for i, f in enumerate(self.targets):
            for v in f:
                masks[v] |= 1 << i
        return masks

    def large_masks(self) -> list[int]:
        """Bitmask per vertex over the large sets only (bit j = ``large_sets[j]``)."""
        masks = [0] * self.arena.vertex_count
        for j, f in enumerate(self.large_sets):
            for v in f:
                masks[v] |= 1 << j
        return masks

    def start_mask(self) -> int:
        return self.target_masks()[self.start]

    def restrict(self, indices: Iterable[int]) -> "GameSpec":
        """Keep only the targets with the given (combined) indices."""
        keep = set(indices)
        k = len(self.singletons)
        return GameSpec(
            self.arena, self.start,
            tuple(t for i, t in enumerate(self.singletons) if i in keep),
            tuple(f for j, f in enumerate(self.large_sets) if j + k in keep),
            self.labels)

    def with_arena(self, arena: Arena) -> "GameSpec":
        return GameSpec(arena, self.start, self.singletons, self.large_sets, self.labels)

    def with_targets(self, singletons=(), large_sets=()) -> "GameSpec":
        return GameSpec(self.arena, self.start, tuple(singletons),
                        tuple(large_sets), self.labels)

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels else str(v)


class Shape(enum.Enum):
    ALL_SINGLETON = "all-singleton"
    ONE_LARGE = "one-large"
    FEW_LARGE = "few-large"
    GENERAL = "general"


class Profile(enum.Enum):
    TWO_PLAYER = "two-player"
    ONLY_EVE = "only-eve"
    ONLY_ADAM = "only-adam"


@dataclass(frozen=True)
class InstanceClass:
    shape: Shape
    large_count: int
    profile: Profile

    def __str__(self) -> str:
        shape = self.shape.value
        if self.shape in (Shape.FEW_LARGE, Shape.GENERAL):
            shape = f"{shape}({self.large_count})"
        return f"{shape}, {self.profile.value}"


DEFAULT_FPT_CUTOFF = 20


def player_profile(arena: Arena) -> Profile:
    owners = set(arena.owner)
    if owners == {EVE}:
        return Profile.ONLY_EVE
    if owners == {ADAM}:
        return Profile.ONLY_ADAM
    return Profile.TWO_PLAYER


def classify(g: GameSpec, fpt_cutoff: int = DEFAULT_FPT_CUTOFF) -> InstanceClass:
    """Instance class driving solver dispatch.

    Games with more than ``fpt_cutoff`` large sets are classed GENERAL.
    """
    k = len(g.large_sets)
    if k == 0:
        shape = Shape.ALL_SINGLETON
    elif k == 1:
        shape = Shape.ONE_LARGE
    elif k <= fpt_cutoff:
        shape = Shape.FEW_LARGE
    else:
        shape = Shape.GENERAL
    return InstanceClass(shape, k, player_profile(g.arena))


# ---------------------------------------------------------------------------
# strongly connected components

def tarjan(n: int, successors: Sequence[Sequence[int]]) -> list[list[int]]:
    """Iterative Tarjan over nodes ``0..n-1``.

    Components are emitted sinks first, i.e. every edge between different
    components goes from a later component to an earlier one.
    """
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            succ = successors[v]
            if i < len(succ):
                work[-1] = (v, i + 1)
                w = succ[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class SccDag:
    component_of: tuple[int, ...]
    components: tuple[frozenset[int], ...]   # reverse topological order
    dag_edges: tuple[frozenset[int], ...]    # component -> successor components

    def is_cyclic(self, c: int, arena: Arena) -> bool:
        """True if component ``c`` contains a cycle (size > 1 or a self-loop)."""
        comp = self.components[c]
        if len(comp) > 1:
            return True
        (v,) = comp
        return v in arena.successors[v]


def scc_decompose(a: Arena) -> SccDag:
    comps = tarjan(a.vertex_count, a.successors)
    component_of = [0] * a.vertex_count
    for c, comp in enumerate(comps):
        for v in comp:
            component_of[v] = c
    dag: list[set[int]] = [set() for _ in comps]
    for u, succ in enumerate(a.successors):
        cu = component_of[u]
        for v in succ:
            cv = component_of[v]
            if cv != cu:
                dag[cu].add(cv)
    return SccDag(tuple(component_of),
                  tuple(frozenset(c) for c in comps),
                  tuple(frozenset(d) for d in dag))


# ---------------------------------------------------------------------------
# text format

def _int(token: str, lineno: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {token!r}", lineno) from None
    if value < 0:
        raise ParseError(f"negative {what} {value}", lineno)
    return value


def parse_game(text: str | Iterable[str]) -> GameSpec:
    """Parse a ``grg 1`` game description."""
    lines = text.splitlines() if isinstance(text, str) else list(text)
    header_seen = False
    owners: dict[int, Player] = {}
    succs: dict[int, tuple[int, ...]] = {}
    labels: dict[int, str] = {}
    decl_line: dict[int, int] = {}
    start = None
    singletons: list[int] = []
    large: list[frozenset[int]] = []
    target_lines: list[tuple[int, list[int]]] = []

    for lineno, raw in enumerate(lines, 1):
        body, _, comment = raw.partition("#")
        tokens = body.split()
        if not tokens:
            continue
        if not header_seen:
            if tokens != ["grg", "1"]:
                raise ParseError(f"expected header {FORMAT_HEADER!r}", lineno)
            header_seen = True
            continue
        keyword = tokens[0]
        if keyword == "vertex":
            if len(tokens) < 4:
                raise ParseError("vertex line needs: vertex <id> <E|A> <succ,...>", lineno)
            v = _int(tokens[1], lineno, "vertex id")
            if v in owners:
                raise ParseError(
                    f"vertex {v} already declared on line {decl_line[v]}", lineno)
            if tokens[2] not in ("E", "A"):
                raise ParseError(f"owner must be E or A, got {tokens[2]!r}", lineno)
            raw_succ = [s for s in "".join(tokens[3:]).split(",") if s]
            if not raw_succ:
                raise ParseError(f"vertex {v} has an empty successor list", lineno)
            succ = tuple(_int(s, lineno, "successor id") for s in raw_succ)
            if len(set(succ)) != len(succ):
                raise ParseError(f"vertex {v} lists a successor twice", lineno)
            owners[v] = Player(tokens[2])
            succs[v] = succ
            decl_line[v] = lineno
            comment = comment.strip()
            if comment.startswith("label:"):
                labels[v] = comment[len("label:"):].strip()
        elif keyword == "start":
            if len(tokens) != 2:
                raise ParseError("start line needs exactly one vertex id", lineno)
            if start is not None:
                raise ParseError("duplicate start line", lineno)
            start = (_int(tokens[1], lineno, "start vertex"), lineno)
        elif keyword == "target":
            if len(tokens) < 2:
                raise ParseError("target line needs at least one vertex id", lineno)
            ids = [_int(t, lineno, "target vertex") for t in tokens[1:]]
            target_lines.append((lineno, ids))
        else:
            raise ParseError(f"unknown keyword {keyword!r}", lineno)

    if not header_seen:
        raise ParseError(f"missing header {FORMAT_HEADER!r}")
    n = len(owners)
    if n == 0:
        raise ParseError("game has no vertices")
    if sorted(owners) != list(range(n)):
        missing = min(set(range(n)) - set(owners))
        raise ParseError(f"vertex ids must be exactly 0..{n - 1}; {missing} is missing")
    for v, succ in succs.items():
        for w in succ:
            if w >= n:
                raise ParseError(f"vertex {v}: dangling successor {w}", decl_line[v])
    if start is None:
        raise ParseError("missing start line")
    if start[0] >= n:
        raise ParseError(f"dangling start vertex {start[0]}", start[1])
    for lineno, ids in target_lines:
        for t in ids:
            if t >= n:
                raise ParseError(f"dangling target vertex {t}", lineno)
        members = frozenset(ids)
        if len(members) == 1:
            (t,) = members
            if t in singletons:
                logger.warning("line %d: duplicate singleton target %d collapsed",
                               lineno, t)
                continue
            singletons.append(t)
        else:
            large.append(members)

    arena = Arena(tuple(owners[v] for v in range(n)), tuple(succs[v] for v in range(n)))
    label_tuple = None
    if labels:
        label_tuple = tuple(labels.get(v, str(v)) for v in range(n))
    return GameSpec(arena, start[0], tuple(singletons), tuple(large), label_tuple)


def serialize_game(g: GameSpec, comment: str | None = None) -> str:
    """Render ``g`` in the ``grg 1`` format; deterministic byte for byte."""
    out = [FORMAT_HEADER]
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    a = g.arena
    for v in range(a.vertex_count):
        line = f"vertex {v} {a.owner[v].value} {','.join(map(str, a.successors[v]))}"
        if g.labels is not None:
            line += f"  # label: {g.labels[v]}"
        out.append(line)
    out.append(f"start {g.start}")
    for t in g.singletons:
        out.append(f"target {t}")
    for f in g.large_sets:
        out.append("target " + " ".join(map(str, sorted(f))))
    return "\n".join(out) + "\n"


def load_game(path) -> GameSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_game(fh.read())
