import math
from fractions import Fraction

import numpy as np
import pytest

from lddkit import (DecompositionConfig, RngStream, WeightedDigraph,
                    check_separation, check_structure, decompose_separated,
                    edges_within, label_heavy_light, weak_diameter)
from lddkit.separated import SeparationSchedule
from lddkit.generators import bipath, cycle, grid, path, random_digraph, star_cycle

from oracles import random_graph_edges


def test_schedule_shape():
    for m in (3, 50, 1000, 10**6):
        sched = SeparationSchedule.build(m, 64, 2)
        want_L = max(1, math.ceil(math.log2(math.log2(m)))) if m > 2 else 1
        assert sched.L == want_L
        assert sched.a[0] == Fraction(64, 8)
        for i in range(1, sched.L + 1):
            assert sched.a[i] < sched.a[i - 1]
        assert sched.a[-1] >= 0


def test_schedule_windows_nonempty():
    for D in (4, 16, 40, 64, 300):
        sched = SeparationSchedule.build(500, D, 1)
        for i in range(1, sched.L + 1):
            lo, hi = sched.window(i)
            assert hi >= lo + 1


def test_labels_empty_graph_all_light():
    g = WeightedDigraph(5, [])
    labels = label_heavy_light(g, 24)
    assert not labels.in_heavy.any() and not labels.out_heavy.any()


def test_labels_complete_bidirected_triangle_all_heavy():
    edges = [(u, v, 1) for u in range(3) for v in range(3) if u != v]
    g = WeightedDigraph(3, edges)
    labels = label_heavy_light(g, 24)  # D/8 = 3 covers everything
    assert labels.in_heavy.all() and labels.out_heavy.all()


def test_labels_star_cycle_hub_out_heavy_rest_light():
    g = star_cycle(9)
    D = 8  # radius D/8 = 1
    labels = label_heavy_light(g, D)
    assert labels.out_heavy[0] == 1
    # exact oracle: edges induced by each radius-1 out-ball
    for v in range(1, 9):
        members = [v, (v + 1) % 9]
        assert 2 * edges_within(g, members) < g.m
        assert labels.out_heavy[v] == 0


def test_labels_sandwich_invariant():
    g = WeightedDigraph(30, random_graph_edges(30, 120, seed=5))
    D = 32
    labels = label_heavy_light(g, D)
    from lddkit import ball
    for v in range(30):
        for heavy, direction in ((labels.in_heavy[v], "in"), (labels.out_heavy[v], "out")):
            count = edges_within(g, ball(g, v, D // 8, direction).tolist())
            if heavy:
                assert 2 * count >= g.m
            else:
                assert 4 * count <= 3 * g.m


def test_base_case_single_edge_orders_topologically():
    g = WeightedDigraph(3, [(2, 0, 1)])
    c, marks, _ = decompose_separated(g, 16, 2, seed=1)
    idx = c.cluster_index()
    assert idx[2] < idx[0]
    assert marks.marked_count() == 0
    assert len(c) == 3


def test_zero_separation_marks_nothing():
    for seed in range(5):
        g = bipath(60)
        _, marks, _ = decompose_separated(g, 24, 0, seed=seed)
        assert marks.marked_count() == 0


def test_separation_exact_on_bidirected_path():
    g = bipath(100)
    for seed in range(40):
        c, marks, _ = decompose_separated(g, 40, 3, seed=seed)
        assert check_structure(g, c, 40).passed
        assert check_separation(g, c, marks, 3).passed
        unmarked = 1 - marks.marked_count() / 100
        assert unmarked >= 0.05


def test_cut_set_independent_of_separation():
    for maker, D in ((lambda: bipath(80), 24), (lambda: star_cycle(48), 48),
                     (lambda: grid(7), 32)):
        g = maker()
        cut_sets = []
        for d in (0, 1, 5):
            c, _, _ = decompose_separated(g, D, d, seed=99)
            cut_sets.append(frozenset(c.cut_edges))
        assert cut_sets[0] == cut_sets[1] == cut_sets[2]


def test_alternation_no_in_heavy_starts_minus():
    g = star_cycle(64)  # hub is out-heavy, nobody is in-heavy
    _, _, stats = decompose_separated(g, 64, 1, seed=3, collect_stats=True)
    top = [r for r in stats.iterations if r.depth == 0]
    assert top, "expected iteration records at the top level"
    for rec in top:
        assert rec.direction == ("-" if rec.i % 2 == 1 else "+")
    assert stats.cases[0] == (0, "iters-")


def test_alternation_no_out_heavy_starts_plus():
    g = star_cycle(64).reverse()  # hub becomes in-heavy; nobody out-heavy
    _, _, stats = decompose_separated(g, 64, 1, seed=3, collect_stats=True)
    top = [r for r in stats.iterations if r.depth == 0]
    assert stats.cases[0] == (0, "iters+")
    for rec in top:
        assert rec.direction == ("+" if rec.i % 2 == 1 else "-")


def test_last_iteration_empties_everything():
    # no leftover singletons on graphs without isolated vertices
    for seed in range(8):
        g = bipath(70)
        _, _, stats = decompose_separated(g, 24, 1, seed=seed, collect_stats=True)
        assert stats.leftover_singletons == 0


def test_isolated_vertices_become_singletons():
    edges = [(0, 1, 1), (1, 0, 1), (2, 3, 1), (3, 2, 1)]
    g = WeightedDigraph(6, edges)  # vertices 4, 5 isolated
    c, _, _ = decompose_separated(g, 16, 1, seed=2)
    flat = sorted(v for cl in c.clusters for v in cl.tolist())
    assert flat == list(range(6))


def test_case_a_complete_bidirected_single_cluster():
    edges = [(u, v, 1) for u in range(6) for v in range(6) if u != v]
    g = WeightedDigraph(6, edges)
    c, marks, stats = decompose_separated(g, 48, 2, seed=4, collect_stats=True)
    assert any(kind.startswith("a") for _d, kind in stats.cases)
    assert len(c) == 1
    assert sorted(c.clusters[0].tolist()) == list(range(6))
    assert marks.marked_count() == 0


def _dumbbell(k, bridge_len):
    edges = []
    for base in (0, k):
        for u in range(k):
            for v in range(k):
                if u != v:
                    edges.append((base + u, base + v, 1))
    edges.append((0, k, bridge_len))
    edges.append((k, 0, bridge_len))
    return WeightedDigraph(2 * k, edges)


def test_case_a_dumbbell_central_cluster_diameter():
    D = 40
    g = _dumbbell(6, D // 5)
    c, _, stats = decompose_separated(g, D, 2, seed=6, collect_stats=True)
    assert any(kind.startswith("a") for _d, kind in stats.cases)
    for cl in c.clusters:
        if len(cl) > 1:
            assert weak_diameter(g, cl.tolist()) <= D
    assert check_structure(g, c, D).passed


def _double_star(k, extra_out_of_sink=False):
    # vertices: 0 = sink hub (in-heavy), 1 = source hub (out-heavy),
    # 2..k+1 = middle; edges 1 -> x -> 0.  The hubs' radius-D/8 ball edge
    # sets split the edges in half exactly, and dist(0, 1) = inf > D/4.
    edges = [(1, 2 + i, 1) for i in range(k)] + [(2 + i, 0, 1) for i in range(k)]
    n = k + 2
    if extra_out_of_sink:
        edges.append((0, n, 1))  # gives the out-ball union one extra edge
        n += 1
    return WeightedDigraph(n, edges)


def test_case_b_tie_recurses_on_out_side():
    D = 64
    g = _double_star(20)
    labels = label_heavy_light(g, D)
    assert labels.in_heavy_vertices().tolist() == [0]
    assert labels.out_heavy_vertices().tolist() == [1]
    c, marks, stats = decompose_separated(g, D, 2, seed=8, collect_stats=True)
    kinds = [kind for _d, kind in stats.cases]
    assert any(k.startswith("b-out") for k in kinds), kinds
    assert check_structure(g, c, D).passed
    assert check_separation(g, c, marks, 2).passed


def test_case_b_asymmetric_recurses_on_smaller_side():
    D = 64
    g = _double_star(20, extra_out_of_sink=True)
    c, marks, stats = decompose_separated(g, D, 2, seed=8, collect_stats=True)
    kinds = [kind for _d, kind in stats.cases]
    assert any(k.startswith("b-in") for k in kinds), kinds
    assert check_structure(g, c, D).passed
    assert check_separation(g, c, marks, 2).passed


def test_case_b_zero_separation_marks_nothing_in_step():
    g = _double_star(20)
    _, marks, _ = decompose_separated(g, 64, 0, seed=8)
    assert marks.marked_count() == 0


def test_short_cut_edges_have_marked_endpoints():
    for seed in range(10):
        g = bipath(90)
        d = 2
        c, marks, _ = decompose_separated(g, 32, d, seed=seed)
        for (u, v) in c.cut_edges:
            k = g.edge_id(u, v)
            if g.length[k] <= d:
                assert marks.mk[u] and marks.mk[v]


def test_debug_assertions_clean():
    cfg = DecompositionConfig(assertion_level="debug")
    for maker, D in ((lambda: bipath(60), 24), (lambda: star_cycle(40), 40),
                     (lambda: grid(6), 32),
                     (lambda: random_digraph(80, 0.05, RngStream(4)), 32)):
        g = maker()
        c, marks, _ = decompose_separated(g, D, 2, seed=5, config=cfg)
        assert check_structure(g, c, D).passed
        assert check_separation(g, c, marks, 2).passed


def test_deterministic():
    g = grid(7)
    a = decompose_separated(g, 32, 2, seed=77)
    b = decompose_separated(g, 32, 2, seed=77)
    assert [x.tolist() for x in a[0].clusters] == [x.tolist() for x in b[0].clusters]
    assert (a[1].mk == b[1].mk).all()


def test_every_vertex_sometimes_unmarked():
    # clustering-probability positivity on a calibration graph
    g = bipath(40)
    D, d = 32, 1
    never = np.ones(40, dtype=bool)
    for seed in range(2000):
        _, marks, _ = decompose_separated(g, D, d, seed=seed)
        never &= marks.mk.astype(bool)
        if not never.any():
            break
    assert not never.any(), f"vertices never unmarked: {np.flatnonzero(never)}"
