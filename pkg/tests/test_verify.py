import math

import numpy as np
import pytest

from lddkit import (MarkVector, OrderedClustering, ProbeSpec, RngStream,
                    WeightedDigraph, check_appendix_inequalities,
                    check_separation, check_structure, decompose_separated,
                    estimate_event, independence_test, wilson_interval)
from lddkit.generators import bipath, path
from lddkit.verify import theory_exponent, undirected_probe_distance


def test_wilson_brackets_point_estimate():
    for count, trials in ((0, 100), (3, 100), (50, 100), (100, 100)):
        lo, hi = wilson_interval(count, trials)
        assert lo <= count / trials <= hi


def test_wilson_shrinks_like_sqrt_n():
    w1 = wilson_interval(100, 500)
    w2 = wilson_interval(1600, 8000)
    width1 = w1[1] - w1[0]
    width2 = w2[1] - w2[0]
    assert 2.5 <= width1 / width2 <= 6.0


def test_probe_constructors_validate():
    g = path(6)
    with pytest.raises(ValueError):
        ProbeSpec.edge(g, 3, 0)
    with pytest.raises(ValueError):
        ProbeSpec.path(g, [0, 2])
    with pytest.raises(ValueError):
        ProbeSpec.edge_subset(g, [])
    probe = ProbeSpec.path(g, [1, 2, 3])
    assert probe.d_total == 2


def test_estimate_event_two_cycle_never_cut():
    g = WeightedDigraph(2, [(0, 1, 1), (1, 0, 1)])
    probe = ProbeSpec.edge(g, 0, 1)
    rep = estimate_event(g, "bfhl", 64, 0, probe, trials=120, base_seed=5)
    assert rep.event_count == 0
    assert rep.wilson_95[0] == 0.0


def test_estimate_event_reproducible():
    g = path(64)
    probe = ProbeSpec.edge(g, 30, 31)
    a = estimate_event(g, "bfhl", 16, 0, probe, trials=150, base_seed=9)
    b = estimate_event(g, "bfhl", 16, 0, probe, trials=150, base_seed=9)
    assert a.event_count == b.event_count
    assert a.trials == 150


def test_estimate_event_requires_trials():
    g = path(8)
    with pytest.raises(ValueError):
        estimate_event(g, "bfhl", 8, 0, ProbeSpec.edge(g, 0, 1), 10, 1)


def test_middle_edge_survival_beats_vacuous_floor():
    g = path(256)
    probe = ProbeSpec.edge(g, 128, 129)
    rep = estimate_event(g, "bfhl", 64, 0, probe, trials=400, base_seed=17)
    not_cut = 1.0 - rep.point_estimate
    sigma = math.sqrt(max(rep.point_estimate * (1 - rep.point_estimate), 1e-9) / 400)
    assert not_cut >= rep.theory_lower_bound - 3 * sigma
    assert rep.theory_lower_bound < 1e-100  # vacuous at desk scale


def test_vertex_probe_matches_direct_mark_counting():
    g = bipath(60)
    D, d, trials, seed = 24, 0, 150, 33
    probe = ProbeSpec.vertex(30, d)
    rep = estimate_event(g, "l25", D, d, probe, trials=trials, base_seed=seed)
    direct = 0
    for i in range(trials):
        _, marks, _ = decompose_separated(g, D, d, seed=seed + i)
        direct += int(marks.mk[30] == 0)
    assert rep.event_count == direct


def test_vertex_probe_rejects_bfhl():
    g = path(16)
    with pytest.raises(ValueError):
        estimate_event(g, "bfhl", 8, 0, ProbeSpec.vertex(3, 0), 100, 1)


def test_theory_exponent_formula():
    g = path(256)
    # (d / D) * 640 * L * log2(m) with L = ceil(log log m) + 1 = 4
    val = theory_exponent(g, 64, 1)
    assert val == pytest.approx((1 / 64) * 640 * 4 * math.log2(255))


def test_check_structure_accepts_valid_and_rejects_oversized():
    g = path(8)
    good = OrderedClustering(clusters=[np.array([v]) for v in range(8)],
                             cut_edges=set(), D=4)
    assert check_structure(g, good, 4).passed
    bad = OrderedClustering(clusters=[np.arange(8)], cut_edges=set(), D=4)
    rep = check_structure(g, bad, 4)
    assert not rep.passed
    assert not rep.checks["weak_diameter"] or not rep.checks["scc_purity"]


def test_check_structure_flags_backward_edge_outside_cut_set():
    g = path(3)
    bad_order = OrderedClustering(
        clusters=[np.array([2]), np.array([1]), np.array([0])],
        cut_edges=set(), D=3)
    rep = check_structure(g, bad_order, 3)
    assert not rep.checks["backward_edges_in_cut_set"]


def test_check_structure_flags_overlap_and_gaps():
    g = path(3)
    rep = check_structure(g, OrderedClustering(
        clusters=[np.array([0, 1]), np.array([1, 2])], cut_edges=set(), D=3), 3)
    assert not rep.checks["disjoint"]
    rep2 = check_structure(g, OrderedClustering(
        clusters=[np.array([0]), np.array([2])], cut_edges=set(), D=3), 3)
    assert not rep2.checks["coverage"]


def test_check_separation_vacuous_and_witness():
    g = bipath(20)
    clustering = OrderedClustering(
        clusters=[np.array([v]) for v in range(20)], cut_edges=set(), D=8)
    all_marked = MarkVector(mk=np.ones(20, dtype=np.uint8))
    assert check_separation(g, clustering, all_marked, 3).passed
    none_marked = MarkVector(mk=np.zeros(20, dtype=np.uint8))
    res = check_separation(g, clustering, none_marked, 3)
    assert not res.passed
    u, v, dist = res.witness
    assert clustering.cluster_of(u) > clustering.cluster_of(v)
    assert 0 < dist <= 3


def test_check_separation_d_zero_trivial():
    g = bipath(10)
    clustering = OrderedClustering(
        clusters=[np.array([v]) for v in range(10)], cut_edges=set(), D=8)
    marks = MarkVector(mk=np.zeros(10, dtype=np.uint8))
    assert check_separation(g, clustering, marks, 0).passed


def test_undirected_distance_gate():
    g = path(600)
    a = ProbeSpec.edge(g, 10, 11)
    b = ProbeSpec.edge(g, 580, 581)
    assert undirected_probe_distance(g, a, b, 2 * 32)
    c = ProbeSpec.edge(g, 12, 13)
    assert not undirected_probe_distance(g, a, c, 2 * 32)


def test_independence_rejects_close_probes():
    g = path(64)
    with pytest.raises(ValueError):
        independence_test(g, 16, ProbeSpec.edge(g, 10, 11),
                          ProbeSpec.edge(g, 12, 13), 100, 1)


def test_independence_degenerate_conditioning_flagged():
    # bfhl with huge D never cuts anything here, so B never fires
    g = path(300)
    rep = independence_test(g, 4, ProbeSpec.edge(g, 10, 11),
                            ProbeSpec.edge(g, 290, 291), 100, 3)
    # D=4 on a unit path cuts every edge (all long), so B always fires
    assert rep.conditioning_events in (0, 100)
    assert not rep.sufficient


def test_independence_far_apart_small_z():
    g = path(512)
    rep = independence_test(g, 32, ProbeSpec.edge(g, 60, 61),
                            ProbeSpec.edge(g, 440, 441), trials=600, seed=11)
    assert rep.sufficient
    assert abs(rep.z_score) <= 4.0  # loose gate at this trial count


def test_inequalities_spec_examples():
    # r=2, d=1, k=(1, 0): both sides equal 1/2
    ks = np.array([[1.0, 0.0]])
    from lddkit.verify import _prefix_ratio_lhs
    lhs = _prefix_ratio_lhs(ks, 1)[0]
    rhs = 1 - (1 - 1 / 2) * 1.0 ** (-1.0)
    assert lhs == pytest.approx(rhs) == pytest.approx(0.5)
    # k1 = k2 = k3 = 1: 5/6 <= 2 - 2/sqrt(3)
    lhs2 = 1 / 2 + 1 / 3
    rhs2 = 2 - 2 * math.sqrt(1 / 3)
    assert lhs2 <= rhs2
    assert rhs2 == pytest.approx(0.845299, abs=1e-6)


def test_inequalities_random_instances():
    rep = check_appendix_inequalities(8000, RngStream(404))
    assert rep.passed, (rep.max_violation, rep.equality_gap)


def test_inequalities_equality_case_tight():
    rep = check_appendix_inequalities(2000, RngStream(17))
    assert rep.equality_gap <= 1e-9
