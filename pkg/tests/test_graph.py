import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lddkit import (GraphError, WeightedDigraph, ball, dijkstra_multi,
                    edges_within, induced_subgraph, reverse, scc_condensation,
                    weak_diameter)
from lddkit.generators import path, star_cycle

from oracles import bellman_ford, brute_sccs, brute_weak_diameter, random_graph_edges


def test_construction_rejects_self_loops():
    with pytest.raises(GraphError):
        WeightedDigraph(2, [(0, 0, 1)])


def test_construction_rejects_parallel_edges():
    with pytest.raises(GraphError):
        WeightedDigraph(2, [(0, 1, 1), (0, 1, 2)])


def test_construction_rejects_bad_lengths():
    with pytest.raises(GraphError):
        WeightedDigraph(2, [(0, 1, 0)])
    with pytest.raises(GraphError):
        WeightedDigraph(2, [(0, 1, -3)])


def test_dijkstra_single_vertex():
    g = WeightedDigraph(1, [])
    dm = dijkstra_multi(g, [0])
    assert dm[0] == 0


def test_dijkstra_unit_path():
    g = path(3)
    dm = dijkstra_multi(g, [0], direction="out")
    assert [dm[v] for v in range(3)] == [0, 1, 2]


def test_dijkstra_star_cycle_hub_reaches_all_in_one():
    g = star_cycle(5)
    dm = dijkstra_multi(g, [0], direction="out")
    assert all(dm[v] <= 1 for v in range(5))


def test_dijkstra_empty_sources_error():
    with pytest.raises(GraphError):
        dijkstra_multi(path(3), [])


def test_dijkstra_bound_prunes():
    g = path(6)
    dm = dijkstra_multi(g, [0], bound=2)
    assert dm[2] == 2 and dm[3] == math.inf and not dm.reachable(5)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("direction", ["out", "in"])
def test_dijkstra_matches_bellman_ford(seed, direction):
    n = 4 + (seed * 7) % 17
    edges = random_graph_edges(n, 3 * n, seed=seed)
    g = WeightedDigraph(n, edges)
    sources = [seed % n, (3 * seed + 1) % n]
    dm = dijkstra_multi(g, sources, direction=direction)
    expected = bellman_ford(n, edges, sources, direction)
    assert [dm[v] for v in range(n)] == expected


def test_ball_zero_radius():
    g = star_cycle(6)
    assert ball(g, 2, 0).tolist() == [2]


def test_ball_unit_path():
    g = path(3)
    assert ball(g, 0, 1, "out").tolist() == [0, 1]


def test_ball_star_cycle_radius_one_covers_all():
    g = star_cycle(5)
    assert ball(g, 0, 1, "out").tolist() == [0, 1, 2, 3, 4]


def test_ball_out_equals_reverse_in():
    edges = random_graph_edges(12, 30, seed=5)
    g = WeightedDigraph(12, edges)
    rg = reverse(g)
    for v in range(12):
        for r in (0, 1, 3, 7):
            assert ball(g, v, r, "out").tolist() == ball(rg, v, r, "in").tolist()


def test_scc_dag_singletons_in_order():
    g = path(3)
    comps = scc_condensation(g)
    assert [c.tolist() for c in comps] == [[0], [1], [2]]


def test_scc_cycle_single_component():
    g = WeightedDigraph(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)])
    comps = scc_condensation(g)
    assert len(comps) == 1 and sorted(comps[0].tolist()) == [0, 1, 2]


def test_scc_star_cycle_strongly_connected():
    comps = scc_condensation(star_cycle(7))
    assert len(comps) == 1


@pytest.mark.parametrize("seed", range(6))
def test_scc_matches_bruteforce_and_order_valid(seed):
    n = 5 + seed * 2
    edges = random_graph_edges(n, 2 * n, seed=100 + seed)
    g = WeightedDigraph(n, edges)
    comps = scc_condensation(g)
    assert {frozenset(c.tolist()) for c in comps} == brute_sccs(n, edges)
    assert sorted(v for c in comps for v in c.tolist()) == list(range(n))
    pos = {}
    for i, c in enumerate(comps):
        for v in c.tolist():
            pos[v] = i
    for (u, v, _w) in edges:
        if pos[u] != pos[v]:
            assert pos[u] < pos[v], "condensation order has a backward edge"


def test_weak_diameter_singleton():
    assert weak_diameter(path(4), [2]) == 0


def test_weak_diameter_directed_cycle():
    n = 9
    g = WeightedDigraph(n, [(i, (i + 1) % n, 1) for i in range(n)])
    assert weak_diameter(g, range(n)) == n - 1


def test_weak_diameter_unreachable_pair():
    g = WeightedDigraph(2, [])
    assert weak_diameter(g, [0, 1]) == math.inf


def test_weak_diameter_empty_subset_error():
    with pytest.raises(GraphError):
        weak_diameter(path(3), [])


def test_weak_diameter_monotone_under_edge_addition():
    n = 8
    base = [(i, i + 1, 1) for i in range(n - 1)] + [(n - 1, 0, 1)]
    g1 = WeightedDigraph(n, base)
    g2 = WeightedDigraph(n, base + [(4, 0, 1)])
    sub = [0, 3, 5]
    assert weak_diameter(g2, sub) <= weak_diameter(g1, sub)


@pytest.mark.parametrize("seed", range(4))
def test_weak_diameter_matches_bruteforce(seed):
    n = 7
    edges = random_graph_edges(n, 12, seed=200 + seed)
    g = WeightedDigraph(n, edges)
    sub = [0, 2, 5]
    assert weak_diameter(g, sub) == brute_weak_diameter(n, edges, sub)


def test_induced_subgraph_full_copy():
    edges = random_graph_edges(6, 10, seed=3)
    g = WeightedDigraph(6, edges)
    h, mapping = induced_subgraph(g, range(6))
    assert h == g and mapping.tolist() == list(range(6))


def test_induced_subgraph_empty():
    h, mapping = induced_subgraph(path(4), [])
    assert h.n == 0 and h.m == 0 and mapping.size == 0


def test_induced_subgraph_drops_cross_edges():
    h, mapping = induced_subgraph(path(3), [0, 2])
    assert h.n == 2 and h.m == 0 and mapping.tolist() == [0, 2]


def test_reverse_involution_and_edges():
    edges = random_graph_edges(8, 14, seed=9)
    g = WeightedDigraph(8, edges)
    rg = reverse(g)
    assert sorted(rg.edge_list()) == sorted((v, u, w) for (u, v, w) in edges)
    assert reverse(rg) == g


def test_edges_within():
    g = path(3)
    assert edges_within(g, []) == 0
    assert edges_within(g, range(3)) == g.m
    assert edges_within(g, [0, 1]) == 1


@st.composite
def _tiny_graphs(draw):
    n = draw(st.integers(min_value=1, max_value=8))
    pairs = draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
        max_size=20, unique=True))
    edges = [(u, v, draw(st.integers(1, 5))) for (u, v) in pairs if u != v]
    dedup = {}
    for (u, v, w) in edges:
        dedup[(u, v)] = w
    return n, [(u, v, w) for (u, v), w in dedup.items()]


@settings(max_examples=60, deadline=None)
@given(_tiny_graphs())
def test_scc_partition_property(nedges):
    n, edges = nedges
    comps = scc_condensation(WeightedDigraph(n, edges))
    flat = sorted(v for c in comps for v in c.tolist())
    assert flat == list(range(n))


@settings(max_examples=60, deadline=None)
@given(_tiny_graphs(), st.integers(0, 6))
def test_ball_reverse_duality_property(nedges, r):
    n, edges = nedges
    g = WeightedDigraph(n, edges)
    rg = reverse(g)
    for v in range(n):
        assert ball(g, v, r, "in").tolist() == ball(rg, v, r, "out").tolist()
