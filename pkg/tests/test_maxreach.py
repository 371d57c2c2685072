import pytest

from gamegen import class_game
from grg import oracle
from grg.arena import EVE
from grg.errors import WrongClass
from grg.genreach import solve_general
from grg.maxreach import (
    PromisedSubset, choose_max_algorithm, choose_promise_algorithm, max_value,
    max_value_adam_general, max_value_adam_lasso, max_value_eve_scc, max_value_general,
    promise_value, promise_value_adam, promise_value_general, promise_value_singleton,
    target_preorder_graph,
)
from grg.reductions import Graph, game_from_edges, streach_to_game, vertex_cover_to_game


def test_fig1_values(fig1):
    assert max_value_general(fig1).value == 2
    res = promise_value_singleton(fig1)
    assert res.value == 1
    assert [fig1.label(fig1.singletons[i]) for i in res.witness.targets] == ["v"]
    assert promise_value_general(fig1).value == 1


def test_fig1_adam_values(fig1_adam):
    assert max_value_general(fig1_adam).value == 1
    assert max_value_adam_lasso(fig1_adam).value == 1
    assert max_value_adam_general(fig1_adam).value == 1
    assert promise_value_adam(fig1_adam).value == 0
    assert promise_value_general(fig1_adam).value == 0
    # knot v: the lasso s v v
    lasso = max_value_adam_lasso(fig1_adam).witness.lasso
    assert lasso.prefix == (0,) and lasso.cycle == (6,)


def test_fig1_all_eve_matches_product(fig1):
    # frozen from the product solver and the oracle, both 2
    g = fig1.with_arena(fig1.arena.with_owner(EVE))
    assert max_value_eve_scc(g).value == max_value_general(g).value == oracle.oracle_max(g) == 2


def test_fig1_strategies(fig1):
    res = max_value_general(fig1)
    assert oracle.strategy_check(fig1, res.strategy) == 2
    # the two first moves for Eve at s
    s0 = (0, 0)
    assert oracle.strategy_check(fig1, {**res.strategy, s0: 1}) == 2
    go_v = {s0: 6, (6, 0b10000): 6}
    assert oracle.strategy_check(fig1, go_v) == 1


def test_zero_targets():
    g = game_from_edges("EA", [(0, 1), (1, 0)], 0)
    assert max_value_general(g).value == 0
    assert promise_value_general(g).value == 0


def test_eve_scc_examples():
    # one SCC holding four targets
    g = game_from_edges("EEEE", [(0, 1), (1, 2), (2, 3), (3, 0)], 0, singletons=(0, 1, 2, 3))
    assert max_value_eve_scc(g).value == 4
    # two branches with 1 and 3 targets
    edges = [(0, 1), (0, 2), (1, 1), (2, 3), (3, 4), (4, 4)]
    g = game_from_edges("EEEEE", edges, 0, singletons=(1, 2, 3, 4))
    res = max_value_eve_scc(g)
    assert res.value == 3
    assert sum(res.witness.weights) == 3


def test_adam_lasso_examples():
    # target on an unreachable vertex: a target-free lasso exists
    g = game_from_edges("AAA", [(0, 1), (1, 1), (2, 2)], 0, singletons=(2,))
    assert max_value_adam_lasso(g).value == 0
    # every lasso passes t1
    g = game_from_edges("AA", [(0, 1), (1, 0)], 0, singletons=(1,))
    assert max_value_adam_lasso(g).value == 1
    # start is itself a target
    g = game_from_edges("AA", [(0, 1), (1, 1)], 0, singletons=(0, 1))
    assert max_value_adam_lasso(g).value == 2


def test_promise_examples():
    g = game_from_edges("AAA", [(0, 1), (1, 2), (2, 2)], 0, singletons=(1, 2))
    assert promise_value_adam(g).value == 2
    g = game_from_edges("EEE", [(0, 1), (1, 2), (2, 2)], 0, singletons=(1, 2))
    assert promise_value_singleton(g).value == 2


def test_fig1_extra_edges_promise(fig1):
    # add u2 -> u3 and u4 -> u1
    succ = list(fig1.arena.successors)
    succ[3] = (2, 4)
    succ[5] = (4, 2)
    g = fig1.with_arena(type(fig1.arena)(fig1.arena.owner, tuple(succ)))
    assert promise_value_singleton(g).value == oracle.oracle_promise(g)
    assert promise_value_general(g).value == oracle.oracle_promise(g)


def test_preorder_graph(fig1):
    pg = target_preorder_graph(fig1)
    assert pg.vertices == (0, 2, 3, 4, 5, 6)
    assert pg.weight == (0, 1, 1, 1, 1, 1)
    # s is attracted only to v
    assert pg.edges[0] == (5,)
    # u1 <-> u2
    assert 2 in pg.edges[1] and 1 in pg.edges[2]


def test_preorder_graph_weights_include_start_target():
    g = game_from_edges("EE", [(0, 1), (1, 1)], 0, singletons=(0, 1))
    pg = target_preorder_graph(g)
    assert sum(pg.weight) == 2
    assert promise_value_singleton(g).value == 2


def test_vertex_cover_values():
    assert max_value_general(vertex_cover_to_game(Graph(2, ((0, 1),)))[0]).value == 1
    assert max_value_general(vertex_cover_to_game(Graph(3, ((0, 1), (1, 2), (0, 2))))[0]).value == 2
    star = Graph(4, ((0, 1), (0, 2), (0, 3)))
    assert max_value_general(vertex_cover_to_game(star)[0]).value == 1


def test_streach_promise_zero(data_dir):
    from grg.reductions import parse_edge_graph
    h = parse_edge_graph((data_dir / "h3.graph").read_text())
    g, _ = streach_to_game(h, 0, 2)
    assert promise_value_adam(g).value == 0


def test_wrong_class(fig1, fig1_adam):
    with pytest.raises(WrongClass):
        max_value_eve_scc(fig1)
    with pytest.raises(WrongClass):
        max_value_adam_lasso(fig1)
    with pytest.raises(WrongClass):
        promise_value_adam(fig1)
    g = fig1.with_targets((2,), (frozenset({3, 4}),))
    with pytest.raises(WrongClass):
        promise_value_singleton(g)


def test_dispatch(fig1, fig1_adam):
    assert choose_max_algorithm(fig1) == "product"
    assert choose_max_algorithm(fig1_adam) == "adam-lasso"
    assert choose_promise_algorithm(fig1) == "singleton"
    assert choose_promise_algorithm(fig1_adam) == "adam"
    assert max_value(fig1).algorithm == "product"
    with pytest.raises(ValueError):
        max_value(fig1, "nope")
    with pytest.raises(ValueError):
        promise_value(fig1, "nope")


@pytest.mark.parametrize("name", ["mixed", "adam-general", "eve-singleton", "singleton"])
def test_invariants(name):
    for seed in range(150):
        g = class_game(name, seed)
        k = g.target_count
        best = max_value_general(g)
        prom = promise_value(g)
        assert prom.value <= best.value <= k
        # all-targets objective agrees at the top
        assert (best.value == k) == solve_general(g).eve_wins
        assert (promise_value_general(g).value == k) == solve_general(g).eve_wins
        assert isinstance(prom.witness, PromisedSubset)
        assert len(prom.witness.targets) == prom.value
        assert solve_general(g.restrict(prom.witness.targets)).eve_wins
        if k:
            assert oracle.strategy_check(g, best.strategy) >= best.value
        if name.startswith("adam"):
            res = max_value_adam_general(g)
            visited = res.witness.lasso.visited()
            hit = sum(1 for f in g.targets if f & visited)
            assert hit == res.value == res.witness.count
