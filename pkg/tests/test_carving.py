import math

import numpy as np
import pytest

from lddkit import (DecompositionConfig, GraphError, RngStream, WeightedDigraph,
                    check_structure, clustering_from_cuts, cutting_procedure,
                    decompose_ball_carving)
from lddkit.ball_carving import CarvingSchedule, default_delta
from lddkit.generators import bipath, cycle, grid, path, random_digraph, star_cycle


def _schedule_for(g, D):
    return CarvingSchedule.build(g.m, D, g.m, g.n)


def test_schedule_formulas():
    m, D = 255, 64
    sched = CarvingSchedule.build(m, D, m, 256)
    assert sched.L == math.ceil(math.log2(math.log2(m))) + 1 == 4
    assert sched.delta == pytest.approx(math.log2(m) ** -10)
    r = [0]
    for level in range(1, sched.L + 1):
        r.append(r[-1] + D // 2 ** (sched.L - level + 3) + D // (4 * sched.L))
    assert list(sched.r) == r
    assert r[-1] <= D
    for level in range(sched.L + 1):
        assert sched.s[level] == min(2 ** (2 ** (sched.L - level)), m + 1)
    for level in range(1, sched.L + 1):
        width = sched.r[level] - sched.r[level - 1]
        if width:
            expected = 2 * math.log(2 * sched.s[level - 1] / sched.delta) / width
            assert sched.rate(level) == pytest.approx(expected)


def test_schedule_radii_within_diameter_many_params():
    for m in (2, 9, 100, 4000, 10**6):
        for D in (1, 8, 33, 512):
            sched = CarvingSchedule.build(m, D, m, m + 1)
            assert sched.r[-1] <= D
            assert all(b >= a for a, b in zip(sched.r, sched.r[1:]))


def test_long_edge_rule_exact_comparison():
    sched = CarvingSchedule.build(200, 66, 200, 100)
    threshold = 66 / (4 * sched.L)
    for length in range(1, 30):
        assert sched.is_long_edge(length) == (length >= threshold)


def test_cutting_zero_or_one_edge_is_noop():
    for edges in ([], [(0, 1, 1)]):
        g = WeightedDigraph(3, edges)
        sched = _schedule_for(g, 16)
        res = cutting_procedure(g, sched, sched.L, RngStream(1))
        assert res.cut_eids.size == 0
        assert res.remaining.all()
        assert res.balls == []


def test_cutting_all_size_tests_fail():
    # disjoint edges: every ball holds at most 1 edge, far below m / (2 s0)
    g = WeightedDigraph(40, [(2 * i, 2 * i + 1, 1) for i in range(20)])
    sched = _schedule_for(g, 32)
    res = cutting_procedure(g, sched, sched.L, RngStream(3))
    assert res.cut_eids.size == 0 and res.balls == [] and res.remaining.all()


def test_cutting_cycle64_carves_with_radius_in_window():
    g = cycle(64)
    D = 32
    sched = _schedule_for(g, D)
    res = cutting_procedure(g, sched, sched.L, RngStream(7), collect_records=True)
    assert len(res.balls) >= 1
    r0, r1 = sched.r[sched.L - 1], sched.r[sched.L]
    for rec in res.records:
        assert r0 <= rec.radius < r1
    assert len(res.balls) <= 2 * sched.s[sched.L - 1]
    # boundaries were taken at carve time: cut edges leave the carved set
    carved = set()
    for b in res.balls:
        assert not (carved & set(b.tolist())), "balls must be vertex-disjoint"
        carved |= set(b.tolist())
    assert set(np.flatnonzero(res.remaining).tolist()) == set(range(64)) - carved


def test_decompose_single_vertex_and_edgeless():
    g = WeightedDigraph(1, [])
    c, _ = decompose_ball_carving(g, 8, seed=0)
    assert [x.tolist() for x in c.clusters] == [[0]] and not c.cut_edges
    g2 = WeightedDigraph(2, [])
    c2, _ = decompose_ball_carving(g2, 8, seed=0)
    assert len(c2) == 2 and not c2.cut_edges


def test_decompose_invalid_diameter():
    with pytest.raises(GraphError):
        decompose_ball_carving(path(4), 0, seed=1)
    with pytest.raises(GraphError):
        decompose_ball_carving(path(4), 10**50, seed=1)


def test_decompose_deterministic():
    g = bipath(80)
    a, _ = decompose_ball_carving(g, 24, seed=123)
    b, _ = decompose_ball_carving(g, 24, seed=123)
    assert [x.tolist() for x in a.clusters] == [x.tolist() for x in b.clusters]
    assert a.cut_edges == b.cut_edges


def test_long_edges_always_cut():
    edges = [(i, i + 1, 1) for i in range(9)] + [(0, 9, 40)]
    g = WeightedDigraph(10, edges)
    c, _ = decompose_ball_carving(g, 16, seed=5)
    assert (0, 9) in c.cut_edges


@pytest.mark.parametrize("maker,D", [
    (lambda: path(256), 64), (lambda: cycle(128), 64), (lambda: bipath(120), 24),
    (lambda: grid(9), 64), (lambda: star_cycle(64), 64),
    (lambda: random_digraph(150, 0.03, RngStream(9)), 64),
])
def test_structural_invariants_across_seeds(maker, D):
    g = maker()
    for seed in range(12):
        c, _ = decompose_ball_carving(g, D, seed=seed)
        rep = check_structure(g, c, D)
        assert rep.passed, rep.summary()


def test_clusters_agree_with_cut_set_assembly():
    # concatenation order and SCCs-of-(G minus S) produce the same clusters
    for seed in range(6):
        g = bipath(100)
        c, _ = decompose_ball_carving(g, 24, seed=seed)
        rebuilt = clustering_from_cuts(g, c.cut_edges, 24)
        assert {frozenset(x.tolist()) for x in c.clusters} == \
            {frozenset(x.tolist()) for x in rebuilt.clusters}


def test_radius_containment_and_depth_bound():
    g = bipath(200)
    seen_records = 0
    for seed in range(6):
        c, stats = decompose_ball_carving(g, 40, seed=seed, collect_stats=True)
        assert stats.max_depth <= 10 * max(1, (g.m - 1).bit_length())
        for rec in stats.carve_records:
            seen_records += 1
            assert rec.radius < 40
    assert seen_records > 0


def test_monotone_diameter_effect_on_paths():
    g = path(256)
    rates = {}
    for D in (32, 64):
        cut = 0
        runs = 250
        for seed in range(runs):
            c, _ = decompose_ball_carving(g, D, seed=seed)
            idx = c.cluster_index()
            cut += int((idx[g.tail] > idx[g.head]).sum())
        rates[D] = cut / (runs * g.m)
    ratio = rates[32] / rates[64]
    assert 1.2 <= ratio <= 8.0, rates


def test_cut_records_use_disjoint_randomness():
    # per-cut draw ranges never overlap within a stream; sibling recursion
    # branches run on distinct spawned streams
    g = bipath(200)
    _, stats = decompose_ball_carving(g, 40, seed=11, collect_stats=True)
    by_path = {}
    for rec in stats.carve_records:
        by_path.setdefault(rec.stream_path, []).append((rec.draw_start, rec.draw_end))
    assert len(stats.carve_records) > 1
    for path_key, spans in by_path.items():
        spans.sort()
        for (a0, a1), (b0, b1) in zip(spans, spans[1:]):
            assert a1 <= b0, "rng draws reused across cuts"


def test_sampled_estimator_strategy_runs_clean():
    g = bipath(80)
    cfg = DecompositionConfig(estimator="sampled", sampled_k=256)
    c, _ = decompose_ball_carving(g, 24, seed=2, config=cfg)
    rep = check_structure(g, c, 24)
    assert rep.passed, rep.summary()
