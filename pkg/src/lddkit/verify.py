"""Monte Carlo verification harness and exact structural checkers.

Statistical estimates come with 95% Wilson intervals and are always reported
next to the theoretical exponential lower bound exp(-(d/D) * 640 L log2 m),
which is numerically vacuous at desk scale; acceptance binds on the exact
property checks and calibrated windows, never on the vacuous bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .ball_carving import CarvingSchedule, decompose_ball_carving
from .clustering import MarkVector, OrderedClustering
from .config import WILSON_Z, NUMERIC_TOLERANCE, DecompositionConfig
from .graph import (INF, Scratch, WeightedDigraph, induced_subgraph,
                    scc_condensation, weak_diameter)
from .randomness import RngStream
from .separated import decompose_separated


# ---------------------------------------------------------------------------
# probes and reports


@dataclass(frozen=True)
class ProbeSpec:
    """What to watch across trials: an edge, a path, a set of edges (cut
    events), or a vertex (clustered event, separated algorithm only)."""

    kind: str  # edge | path | edge_subset | vertex_cluster
    target: tuple
    d_total: int

    @classmethod
    def edge(cls, graph: WeightedDigraph, u: int, v: int):
        k = graph.edge_id(u, v)
        if k is None:
            raise ValueError(f"no edge ({u}, {v}) in the graph")
        return cls(kind="edge", target=((u, v),), d_total=int(graph.length[k]))

    @classmethod
    def path(cls, graph: WeightedDigraph, vertices):
        vs = [int(v) for v in vertices]
        if len(vs) < 2:
            raise ValueError("a path probe needs at least two vertices")
        edges = []
        total = 0
        for a, b in zip(vs, vs[1:]):
            k = graph.edge_id(a, b)
            if k is None:
                raise ValueError(f"path probe uses missing edge ({a}, {b})")
            edges.append((a, b))
            total += int(graph.length[k])
        return cls(kind="path", target=tuple(edges), d_total=total)

    @classmethod
    def edge_subset(cls, graph: WeightedDigraph, pairs):
        edges = []
        total = 0
        for (a, b) in pairs:
            k = graph.edge_id(int(a), int(b))
            if k is None:
                raise ValueError(f"edge subset uses missing edge ({a}, {b})")
            edges.append((int(a), int(b)))
            total += int(graph.length[k])
        if not edges:
            raise ValueError("edge subset must be nonempty")
        return cls(kind="edge_subset", target=tuple(edges), d_total=total)

    @classmethod
    def vertex(cls, v: int, d: int):
        return cls(kind="vertex_cluster", target=(int(v),), d_total=int(d))

    def endpoints(self) -> set[int]:
        if self.kind == "vertex_cluster":
            return {self.target[0]}
        return {v for e in self.target for v in e}


def wilson_interval(count: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    if trials <= 0:
        return (0.0, 1.0)
    phat = count / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (min(phat, max(0.0, center - half)), max(phat, min(1.0, center + half)))


@dataclass(frozen=True)
class ProbeReport:
    probe: ProbeSpec
    trials: int
    event_count: int
    point_estimate: float
    wilson_95: tuple[float, float]
    theory_exponent: float

    @property
    def theory_lower_bound(self) -> float:
        """exp(-theory_exponent): the not-cut / clustered probability floor."""
        return math.exp(-self.theory_exponent)


def theory_exponent(graph: WeightedDigraph, D: int, d_total: int) -> float:
    """(d/D) * 640 L log2 m with the carving schedule's L for this graph."""
    sched = CarvingSchedule.build(graph.m, max(D, 1), graph.m, graph.n)
    return (d_total / D) * 640.0 * sched.L * math.log2(max(graph.m, 2))


# ---------------------------------------------------------------------------
# running trials


def run_decomposition(graph: WeightedDigraph, algo: str, D: int, d: int, seed,
                      config: DecompositionConfig | None = None):
    """One decomposition run; returns (OrderedClustering, MarkVector | None)."""
    if algo == "bfhl":
        clustering, _stats = decompose_ball_carving(graph, D, seed, config=config)
        return clustering, None
    if algo == "l25":
        clustering, marks, _stats = decompose_separated(graph, D, d, seed, config=config)
        return clustering, marks
    raise ValueError(f"unknown algorithm {algo!r}")


def _probe_event(probe: ProbeSpec, clustering: OrderedClustering,
                 marks: MarkVector | None) -> bool:
    idx = clustering.cluster_index()
    if probe.kind == "vertex_cluster":
        if marks is None:
            raise ValueError("vertex_cluster probes need the separated algorithm")
        return marks.clustered(probe.target[0])
    for (u, v) in probe.target:
        if idx[u] > idx[v]:
            return True  # cut
    return False


def estimate_event(graph: WeightedDigraph, algo: str, D: int, d: int,
                   probe: ProbeSpec, trials: int, base_seed: int,
                   config: DecompositionConfig | None = None) -> ProbeReport:
    """Monte Carlo estimate of the probe event over independent seeded runs.

    The event counted is "probe is cut" for edge-like probes and "vertex is
    clustered" for vertex probes.  Reproducible given base_seed (trial i
    uses seed base_seed + i).
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    count = 0
    for i in range(trials):
        clustering, marks = run_decomposition(graph, algo, D, d, base_seed + i, config)
        if _probe_event(probe, clustering, marks):
            count += 1
    d_for_theory = d if probe.kind == "vertex_cluster" else probe.d_total
    return ProbeReport(probe=probe, trials=trials, event_count=count,
                       point_estimate=count / trials,
                       wilson_95=wilson_interval(count, trials),
                       theory_exponent=theory_exponent(graph, D, d_for_theory))


# ---------------------------------------------------------------------------
# independence


@dataclass(frozen=True)
class IndependenceReport:
    unconditional: ProbeReport
    conditional: ProbeReport | None
    z_score: float
    conditioning_events: int
    sufficient: bool


def _undirected_support(graph: WeightedDigraph) -> WeightedDigraph:
    best: dict[tuple[int, int], int] = {}
    for u, v, w in zip(graph.tail.tolist(), graph.head.tolist(), graph.length.tolist()):
        for key in ((u, v), (v, u)):
            if key not in best or best[key] > w:
                best[key] = w
    edges = [(u, v, w) for (u, v), w in sorted(best.items())]
    return WeightedDigraph(graph.n, edges, length_bound=graph.length_bound)


def undirected_probe_distance(graph: WeightedDigraph, probe_a: ProbeSpec,
                              probe_b: ProbeSpec, bound: int) -> bool:
    """True iff the probes' endpoint sets are more than ``bound`` apart in
    the underlying undirected graph."""
    und = _undirected_support(graph)
    sc = Scratch(und)
    src = np.asarray(sorted(probe_a.endpoints()), dtype=np.int64)
    alive = np.ones(und.n, dtype=np.uint8)
    stamp = sc.next_stamp()
    cnt = K.sssp(und.out.indptr, und.out.nbrs, und.out.lens, alive, src,
                 np.int64(bound), sc.dist, sc.seen, sc.visit, stamp,
                 sc.hd, sc.hv, sc.nodes)
    reached = set(sc.nodes[:cnt].tolist())
    return not (reached & probe_b.endpoints())


def independence_test(graph: WeightedDigraph, D: int, probe_a: ProbeSpec,
                      probe_b: ProbeSpec, trials: int, seed: int,
                      config: DecompositionConfig | None = None,
                      algo: str = "bfhl", d: int = 0) -> IndependenceReport:
    """Compare Pr(A cut) against Pr(A cut | B cut) over shared trials.

    Requires the probes to be more than 2D apart in the undirected support;
    conditioning uses rejection (trials where B's event held).  The z score
    treats the two estimates as independent samples, which overstates the
    variance and is therefore conservative for an |z| <= 3 acceptance.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    if not undirected_probe_distance(graph, probe_a, probe_b, 2 * D):
        raise ValueError("probes are within 2D of each other in the undirected support")
    hits_a = 0
    hits_b = 0
    hits_a_given_b = 0
    for i in range(trials):
        clustering, marks = run_decomposition(graph, algo, D, d, seed + i, config)
        ev_a = _probe_event(probe_a, clustering, marks)
        ev_b = _probe_event(probe_b, clustering, marks)
        hits_a += ev_a
        hits_b += ev_b
        if ev_b:
            hits_a_given_b += ev_a
    exp_a = theory_exponent(graph, D, probe_a.d_total)
    unc = ProbeReport(probe=probe_a, trials=trials, event_count=hits_a,
                      point_estimate=hits_a / trials,
                      wilson_95=wilson_interval(hits_a, trials),
                      theory_exponent=exp_a)
    sufficient = 0 < hits_b < trials
    if not sufficient:
        return IndependenceReport(unconditional=unc, conditional=None,
                                  z_score=float("nan"),
                                  conditioning_events=hits_b, sufficient=False)
    cond = ProbeReport(probe=probe_a, trials=hits_b, event_count=hits_a_given_b,
                       point_estimate=hits_a_given_b / hits_b,
                       wilson_95=wilson_interval(hits_a_given_b, hits_b),
                       theory_exponent=exp_a)
    p0, p1 = unc.point_estimate, cond.point_estimate
    var = p0 * (1 - p0) / trials + p1 * (1 - p1) / hits_b
    if var == 0:
        z = 0.0 if p0 == p1 else float("inf")
    else:
        z = (p1 - p0) / math.sqrt(var)
    return IndependenceReport(unconditional=unc, conditional=cond, z_score=z,
                              conditioning_events=hits_b, sufficient=True)


# ---------------------------------------------------------------------------
# exact structural checkers


@dataclass
class StructureReport:
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def summary(self) -> str:
        parts = [f"{name}={'ok' if ok else 'FAIL'}" for name, ok in self.checks.items()]
        return ", ".join(parts)


def check_structure(graph: WeightedDigraph, clustering: OrderedClustering,
                    D: int) -> StructureReport:
    """Named exact checks: disjointness, coverage, SCC purity (in G minus the
    cut set), weak diameter <= D (ambient distances), and backward cross
    edges covered by the cut set.  Strong diameters (inside the cluster's
    own subgraph minus cuts) are measured alongside for observability."""
    rep = StructureReport()
    n = graph.n
    seen = np.zeros(n, dtype=np.int64)
    total = 0
    for c in clustering.clusters:
        seen[np.asarray(c, dtype=np.int64)] += 1
        total += len(c)
    rep.checks["disjoint"] = bool((seen <= 1).all())
    rep.checks["coverage"] = bool(total == n and (seen >= 1).all())
    idx = clustering.cluster_index()
    backward = idx[graph.tail] > idx[graph.head]
    missing = [(int(u), int(v)) for u, v in zip(graph.tail[backward], graph.head[backward])
               if (int(u), int(v)) not in clustering.cut_edges]
    rep.checks["backward_edges_in_cut_set"] = not missing
    if missing:
        rep.details["backward_missing"] = missing[:5]
    cuts = clustering.cut_edges
    purity = True
    for c in clustering.clusters:
        if len(c) <= 1:
            continue
        comps = scc_condensation(graph, subset=c, removed_edges=cuts)
        if len(comps) != 1:
            purity = False
            rep.details.setdefault("not_strongly_connected", []).append(
                [int(v) for v in c[:6]])
            break
    rep.checks["scc_purity"] = purity
    weak_max = 0
    strong_max = 0
    diam_ok = True
    sc = Scratch(graph)
    in_sub = np.zeros(n, dtype=np.uint8)
    alive = np.ones(n, dtype=np.uint8)
    for c in clustering.clusters:
        if len(c) <= 1:
            continue
        sub = np.asarray(c, dtype=np.int64)
        in_sub[sub] = 1
        val, sc.stamp = K.eccentricity_bound(
            graph.out.indptr, graph.out.nbrs, graph.out.lens, alive, sub, in_sub,
            np.int64(D), sc.dist, sc.seen, sc.visit, sc.stamp, sc.hd, sc.hv, sc.nodes)
        in_sub[sub] = 0
        if val >= INF:
            diam_ok = False
            rep.details.setdefault("oversized_clusters", []).append(
                [int(v) for v in c[:6]])
        else:
            weak_max = max(weak_max, int(val))
        child, mapping = induced_subgraph(graph, sub)
        if cuts:
            local = {int(v): i for i, v in enumerate(mapping.tolist())}
            drop = {(local[u], local[v]) for (u, v) in cuts
                    if u in local and v in local}
            if drop:
                keep = np.ones(child.m, dtype=bool)
                for (lu, lv) in drop:
                    k = child.edge_id(lu, lv)
                    if k is not None:
                        keep[k] = False
                child = WeightedDigraph.from_edge_arrays(
                    child.n, child.tail[keep], child.head[keep],
                    child.length[keep], length_bound=child.length_bound)
        sd = weak_diameter(child, range(child.n))
        strong_max = max(strong_max, sd)
    rep.checks["weak_diameter"] = diam_ok
    rep.details["max_weak_diameter"] = weak_max if diam_ok else math.inf
    rep.details["max_strong_diameter"] = strong_max
    rep.details["D"] = D
    return rep


@dataclass(frozen=True)
class SeparationCheck:
    passed: bool
    witness: tuple[int, int, int] | None  # (u later, v earlier, dist)


def check_separation(graph: WeightedDigraph, clustering: OrderedClustering,
                     marks: MarkVector, d: int) -> SeparationCheck:
    """Exact separation check: every clustered (unmarked) vertex of a later
    cluster is at directed distance > d from every clustered vertex of every
    earlier cluster.  Near-linear: one multi-source Dijkstra per cluster,
    bounded at d."""
    if d <= 0:
        return SeparationCheck(passed=True, witness=None)
    idx = clustering.cluster_index()
    unmarked = marks.mk == 0
    sc = Scratch(graph)
    alive = np.ones(graph.n, dtype=np.uint8)
    for ci, cluster in enumerate(clustering.clusters):
        src = np.asarray(cluster, dtype=np.int64)
        src = src[unmarked[src]]
        if src.size == 0:
            continue
        stamp = sc.next_stamp()
        cnt = K.sssp(graph.out.indptr, graph.out.nbrs, graph.out.lens, alive,
                     src, np.int64(d), sc.dist, sc.seen, sc.visit, stamp,
                     sc.hd, sc.hv, sc.nodes)
        reached = sc.nodes[:cnt]
        bad = reached[(idx[reached] < ci) & unmarked[reached]]
        if bad.size:
            v = int(bad[0])
            for u in src.tolist():
                dm = _single_dist(graph, u, v, d, sc)
                if dm is not None:
                    return SeparationCheck(passed=False, witness=(u, v, dm))
            return SeparationCheck(passed=False, witness=(int(src[0]), v, -1))
    return SeparationCheck(passed=True, witness=None)


def _single_dist(graph, u, v, bound, sc):
    alive = np.ones(graph.n, dtype=np.uint8)
    stamp = sc.next_stamp()
    cnt = K.sssp(graph.out.indptr, graph.out.nbrs, graph.out.lens, alive,
                 np.asarray([u], dtype=np.int64), np.int64(bound),
                 sc.dist, sc.seen, sc.visit, stamp, sc.hd, sc.hv, sc.nodes)
    settled = sc.nodes[:cnt]
    if (settled == v).any():
        return int(sc.dist[v])
    return None


# ---------------------------------------------------------------------------
# numeric inequality checks


@dataclass
class InequalityReport:
    samples_per_lemma: int
    max_violation: float
    equality_gap: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= NUMERIC_TOLERANCE and \
            self.equality_gap <= NUMERIC_TOLERANCE


def _prefix_ratio_lhs(ks: np.ndarray, d: int) -> np.ndarray:
    """(1/r) sum_i (window sum of width d ending at i) / (prefix sum at i),
    rows are instances."""
    pref = np.cumsum(ks, axis=1)
    shifted = np.zeros_like(pref)
    if ks.shape[1] > d:
        shifted[:, d:] = pref[:, :-d]
    window = pref - shifted
    return (window / pref).mean(axis=1)


def check_appendix_inequalities(samples: int, rng: RngStream) -> InequalityReport:
    """Random-instance checks of the three averaged-ratio inequalities and
    the equality case of the adjacent-terms bound."""
    max_viol = 0.0
    # adjacent-terms inequality on positive reals across mixed scales
    ks = 10.0 ** (rng.random((samples, 3)) * 6 - 3)
    k1, k2, k3 = ks[:, 0], ks[:, 1], ks[:, 2]
    lhs = k2 / (k1 + k2) + k3 / (k1 + k2 + k3)
    rhs = 2 - 2 * np.sqrt(k1 / (k1 + k2 + k3))
    max_viol = max(max_viol, float((lhs - rhs).max(initial=0.0)))
    # its equality family: k1 + k2 = sqrt(k1 (k1+k2+k3))
    k1 = 10.0 ** (rng.random(samples) * 4 - 2)
    t = 1.0 + 3.0 * rng.random(samples)
    s = k1 * t
    k2 = s - k1
    k3 = s * s / k1 - s
    lhs = k2 / (k1 + k2) + k3 / (k1 + k2 + k3)
    rhs = 2 - 2 * np.sqrt(k1 / (k1 + k2 + k3))
    equality_gap = float(np.abs(lhs - rhs).max(initial=0.0))
    # prefix inequality with window 1, grouped by row length
    for r in range(2, 13):
        nrows = max(1, samples // 11)
        ks = rng.generator.exponential(1.0, size=(nrows, r)) \
            * (10.0 ** (rng.random((nrows, 1)) * 4 - 2))
        ks[rng.random((nrows, r)) < 0.3] = 0.0
        ks[:, 0] = 1.0 + ks[:, 0]
        rng.draws += 3 * nrows * r
        lhs = _prefix_ratio_lhs(ks, 1)
        k = ks.sum(axis=1)
        rhs = 1 - (1 - 1 / r) * k ** (-1.0 / (r - 1))
        max_viol = max(max_viol, float((lhs - rhs).max(initial=0.0)))
    # prefix inequality with window d
    for d in range(1, 5):
        for extra in (0, 3, 7):
            r = 2 * d + extra
            nrows = max(1, samples // 12)
            ks = rng.generator.exponential(1.0, size=(nrows, r)) \
                * (10.0 ** (rng.random((nrows, 1)) * 4 - 2))
            ks[rng.random((nrows, r)) < 0.3] = 0.0
            ks[:, 0] = 1.0 + ks[:, 0]
            rng.draws += 3 * nrows * r
            lhs = _prefix_ratio_lhs(ks, d)
            k = ks.sum(axis=1)
            rd = r // d
            rhs = 1 - (1 - 1 / rd) * k ** (-1.0 / (rd - 1)) if rd > 1 else np.ones(nrows)
            max_viol = max(max_viol, float((lhs - rhs).max(initial=0.0)))
    return InequalityReport(samples_per_lemma=samples, max_violation=max_viol,
                            equality_gap=equality_gap)
