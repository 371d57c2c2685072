import logging

import pytest
from hypothesis import given, settings, strategies as st

from grg import oracle
from grg.arena import ADAM, EVE, Profile, player_profile, serialize_game
from grg.errors import EmptyGraph, InfeasibleParams, ParseError, ValidationError
from grg.genreach import solve
from grg.maxreach import max_value_general
from grg.reductions import (
    Cnf, Graph, Qbf, cnf_to_game, parse_dimacs_cnf, parse_edge_graph, parse_qdimacs,
    qbf_to_game, random_game, streach_to_game, vertex_cover_to_game,
)


def test_phi1_structure(data_dir):
    phi = parse_qdimacs((data_dir / "phi1.qdimacs").read_text())
    assert phi.prefix == (("a", 1), ("e", 2), ("a", 3), ("e", 4))
    g, meta = qbf_to_game(phi)
    assert g.arena.vertex_count == meta.expected_vertices == 13
    named = [sorted(g.label(v) for v in f) for f in g.large_sets]
    assert named == [["x4", "~x1", "~x2"], ["x1", "~x3"], ["x2", "~x3"]]
    assert g.singletons == ()
    # universal choosers belong to Adam
    assert g.arena.owner[0] is ADAM and g.arena.owner[3] is EVE
    assert g.start == 0
    assert g.arena.successors[12] == (12,)


def test_single_existential():
    g, _ = qbf_to_game(Qbf((("e", 1),), ((1,),)))
    assert solve(g).eve_wins
    g, _ = qbf_to_game(Qbf((("a", 1),), ((1,),)))
    assert not solve(g).eve_wins


def test_duplicate_unit_clauses_collapse(caplog):
    with caplog.at_level(logging.WARNING, logger="grg"):
        g, meta = qbf_to_game(Qbf((("e", 1),), ((1,), (1,))))
    assert g.singletons == (1,)
    assert meta.clause_targets == (0, 0)
    assert "duplicate" in caplog.text


def test_free_variables_are_outer_existentials():
    phi = parse_qdimacs("p cnf 2 1\na 2 0\n1 2 0\n")
    assert phi.prefix == (("e", 1), ("a", 2))


@pytest.mark.parametrize("text", [
    "1 2 0\n",
    "p cnf 2 1\n1 3 0\n",
    "p cnf 2 2\n1 2 0\n",
    "p cnf 2 1\n1 2\n",
    "p cnf 2 1\n1 0\na 1 0\n",
    "p cnf 2 1\nx 0\n",
])
def test_qdimacs_errors(text):
    with pytest.raises(ParseError):
        parse_qdimacs(text)


def test_plain_cnf_rejects_quantifiers():
    with pytest.raises(ParseError):
        parse_dimacs_cnf("p cnf 1 1\ne 1 0\n1 0\n")
    assert parse_dimacs_cnf("c hi\np cnf 2 1\n-1 2 0\n").clauses == ((-1, 2),)


@pytest.mark.parametrize("psi, owner, value", [
    (Cnf(1, ((1,), (-1,))), EVE, 1),
    (Cnf(2, ((1, 2), (-1, 2))), EVE, 2),
    (Cnf(2, ((1, 2), (1, -2), (-1,))), ADAM, 2),
])
def test_cnf_values(psi, owner, value):
    g, _ = cnf_to_game(psi, owner)
    assert player_profile(g.arena) is (Profile.ONLY_EVE if owner is EVE else Profile.ONLY_ADAM)
    assert max_value_general(g).value == value
    brute = oracle.max_sat if owner is EVE else oracle.min_sat
    assert brute(psi.nvars, psi.clauses) == value


def test_h3_layered_game(data_dir):
    h = parse_edge_graph((data_dir / "h3.graph").read_text())
    assert h.edges == ((0, 1), (1, 0), (1, 1), (1, 2), (2, 2))
    g, meta = streach_to_game(h, 0, 2)
    assert g.arena.vertex_count == meta.expected_vertices == 14
    assert player_profile(g.arena) is Profile.ONLY_ADAM
    assert g.singletons == (13,)
    assert solve(g).winner is ADAM


def test_streach_unreachable_and_trivial():
    h = Graph(3, ((0, 1), (2, 0)))
    assert solve(streach_to_game(h, 0, 2)[0]).winner is EVE
    assert solve(streach_to_game(h, 1, 1)[0]).winner is ADAM
    with pytest.raises(ValidationError):
        streach_to_game(h, 0, 3)


@pytest.mark.parametrize("text", [
    "e 1 2\n",
    "p edge 2 1\ne 1 3\n",
    "p edge 2 2\ne 1 2\n",
    "p edge 2 1\ne 1\n",
    "p edge 2 1\nq 1 2\n",
    "p cnf 2 1\n",
])
def test_edge_graph_errors(text):
    with pytest.raises(ParseError):
        parse_edge_graph(text)


def test_k3_vertex_cover(data_dir):
    h = parse_edge_graph((data_dir / "k3.graph").read_text())
    g, meta = vertex_cover_to_game(h)
    assert g.arena.vertex_count == meta.expected_vertices == 6
    assert g.start == 3
    assert g.singletons == (0, 1, 2)
    assert max_value_general(g).value == 2


def test_vertex_cover_needs_edges():
    with pytest.raises(EmptyGraph):
        vertex_cover_to_game(Graph(3, ()))


def test_random_game_determinism_and_profiles():
    assert random_game(5, seed=42) == random_game(5, seed=42)
    g = random_game(6, 12, 2, 1, 3, seed=1, profile="adam")
    assert set(g.arena.owner) == {ADAM}
    assert set(random_game(6, seed=1, profile="eve").arena.owner) == {EVE}


@pytest.mark.parametrize("kwargs", [
    dict(n=0), dict(n=3, m=2), dict(n=3, m=10), dict(n=3, singletons=4),
    dict(n=3, large_count=1, large_size=4), dict(n=3, profile="nobody"),
])
def test_random_game_infeasible(kwargs):
    with pytest.raises(InfeasibleParams):
        random_game(**kwargs)


@settings(max_examples=500)
@given(st.integers(1, 30), st.integers(0, 10**9), st.data())
def test_random_games_validate(n, seed, data):
    m = data.draw(st.integers(n, min(n * n, 4 * n)))
    t = data.draw(st.integers(0, n))
    k = data.draw(st.integers(0, 3)) if n >= 2 else 0
    g = random_game(n, m, t, k, 2, seed)
    assert g.arena.edge_count == m
    assert len(g.singletons) == t and len(set(g.singletons)) == t
    assert serialize_game(g) == serialize_game(random_game(n, m, t, k, 2, seed))


clauses = st.lists(st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), min_size=1, max_size=3,
                            unique_by=abs).map(tuple), max_size=4)


@settings(max_examples=300)
@given(st.lists(st.sampled_from("ae"), min_size=3, max_size=3), clauses)
def test_qbf_size_law_and_soundness(quants, cls):
    phi = Qbf(tuple(zip(quants, (1, 2, 3))), tuple(cls))
    g, meta = qbf_to_game(phi)
    assert g.arena.vertex_count == meta.expected_vertices == 10
    assert solve(g).eve_wins == oracle.qbf_eval(phi)
