"""Directed low-diameter decomposition by ball carving with truncated
exponential radii.

One run repeatedly invokes a cutting procedure over a doubly exponential
level schedule, alternating out-ball and in-ball phases, carving balls whose
radii are drawn from TrunExp(p_level, r_{level-1}, r_level).  Carved
components are decomposed recursively with independent substreams; the cut
set accumulates ball boundaries (taken in the graph state at carving time)
plus all long edges removed up front.  Sampling never overshoots the radius
window, so there is no restart path anywhere.

Cluster order invariant (what makes a boundary edge an honest cut): a carved
out-ball is placed after everything that remained at its carving time, an
in-ball before it; among out-balls, later-carved ones come first; among
in-balls, earlier-carved ones come first.  Every edge that ends up backward
in this order is in the cut set by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .ballsize import ball_sizes_all, exact_ball_counts
from .clustering import OrderedClustering, cut_edge_pairs
from .config import DecompositionConfig
from .graph import (GraphError, Scratch, WeightedDigraph, induced_child,
                    induced_eids, scc_topo_scoped)
from .randomness import InternalFaultError, RngStream, TruncExpParams, sample_trunc_exp


def _ceil_log2(x: int) -> int:
    return max(0, int(x - 1).bit_length())


def default_delta(m0: int) -> float:
    """1 / log^10 m, logs in the original edge count (clamped at 1)."""
    return max(1.0, math.log2(max(m0, 2))) ** -10


@dataclass(frozen=True)
class CarvingSchedule:
    """Level schedule: radii windows r_0..r_L and size targets s_0..s_L.

    Recomputed per recursive invocation from that subgraph's edge count,
    except delta and the iteration-count log factors, which always use the
    original graph's m and n.
    """

    D: int
    L: int
    r: tuple[int, ...]
    s: tuple[int, ...]
    delta: float
    m0: int
    n0: int

    @classmethod
    def build(cls, m_inv: int, D: int, m0: int, n0: int, delta: float | None = None):
        if m_inv <= 2:
            L = 1
        else:
            L = max(1, math.ceil(math.log2(math.log2(m_inv))) + 1)
        r = [0]
        for level in range(1, L + 1):
            r.append(r[-1] + D // 2 ** (L - level + 3) + D // (4 * L))
        s = [min(2 ** (2 ** (L - level)), m_inv + 1) for level in range(L + 1)]
        if delta is None:
            delta = default_delta(m0)
        if r[-1] > D:
            raise InternalFaultError("radius schedule exceeded D")
        return cls(D=D, L=L, r=tuple(r), s=tuple(s), delta=delta, m0=m0, n0=n0)

    def degenerate(self, level: int) -> bool:
        return self.r[level] <= self.r[level - 1]

    def rate(self, level: int) -> float:
        """Truncated-exponential rate p_level = 2 ln(2 s_{l-1}/delta) / window."""
        width = self.r[level] - self.r[level - 1]
        return 2.0 * math.log(2.0 * self.s[level - 1] / self.delta) / width

    def is_long_edge(self, length: int) -> bool:
        """Edge length at least D / (4L), compared exactly."""
        return 4 * self.L * int(length) >= self.D


@dataclass
class CarveRecord:
    center: int
    radius: int
    level: int
    out_phase: bool
    size: int
    stream_path: tuple[int, ...]
    draw_start: int
    draw_end: int


@dataclass
class CuttingResult:
    cut_eids: np.ndarray
    remaining: np.ndarray  # uint8 alive mask after carving
    balls: list[np.ndarray]
    records: list[CarveRecord] = field(default_factory=list)


@dataclass
class CarvingStats:
    max_depth: int = 0
    invocations: int = 0
    carve_records: list[CarveRecord] = field(default_factory=list)
    collect_records: bool = False


class _DynSet:
    """Index-addressable set over vertex ids with O(1) sample and removal."""

    __slots__ = ("arr", "pos", "size")

    def __init__(self, items: np.ndarray, n: int):
        self.arr = np.empty(n, dtype=np.int64)
        self.arr[:items.shape[0]] = items
        self.pos = np.full(n, -1, dtype=np.int64)
        self.pos[items] = np.arange(items.shape[0], dtype=np.int64)
        self.size = int(items.shape[0])

    def remove(self, v: int):
        p = self.pos[v]
        if p < 0:
            return
        last = self.arr[self.size - 1]
        self.arr[p] = last
        self.pos[last] = p
        self.pos[v] = -1
        self.size -= 1

    def contains(self, v: int) -> bool:
        return self.pos[v] >= 0

    def members(self) -> np.ndarray:
        return self.arr[:self.size]


def cutting_procedure(graph: WeightedDigraph, schedule: CarvingSchedule, level: int,
                      rng: RngStream, alive: np.ndarray | None = None,
                      scratch: Scratch | None = None,
                      config: DecompositionConfig | None = None,
                      collect_records: bool = False) -> CuttingResult:
    """One invocation of the cutting procedure at the given level.

    Carves out-balls of ``graph`` (pass the reversed view for in-balls).
    Thresholds compare induced-edge ball sizes against m / s fractions of the
    edge count of the graph handed in; iteration budgets use the original
    vertex count from the schedule.  The uniform pick over good nodes is
    realized by collapsing runs of failing picks into one truncated-geometric
    draw, which is distributed identically to picking one node per iteration.
    """
    config = config or DecompositionConfig()
    n = graph.n
    work_alive = (np.ones(n, dtype=np.uint8) if alive is None else alive.copy())
    m_cur = int(K.count_alive_edges(graph.tail, graph.head, work_alive))
    result = CuttingResult(cut_eids=np.empty(0, dtype=np.int64),
                           remaining=work_alive, balls=[])
    if m_cur <= 1 or schedule.degenerate(level):
        return result
    r0, r1 = schedule.r[level - 1], schedule.r[level]
    s0, s1 = schedule.s[level - 1], schedule.s[level]
    sc = scratch or Scratch(graph)
    targets = np.flatnonzero(work_alive).astype(np.int64)

    # good marking: induced-edge ball size at radius r1 within (9/8) m / s1
    cap1 = (9 * m_cur) // (8 * s1)
    if config.estimator == "sampled":
        est = ball_sizes_all(graph, r1, "out", "sampled", "edges",
                             rng=rng, k=config.sampled_k, alive=work_alive)
        b1 = est.values[targets]
    else:
        b1 = exact_ball_counts(graph, targets, r1, "out", "edges",
                               work_alive, sc, cap=cap1)
    goods_initial = targets[8 * s1 * b1 <= 9 * m_cur]

    # size-test values at radius r0, capped just above the demotion threshold
    cstar = (7 * m_cur) // (8 * s0) + 1
    pv = np.zeros(n, dtype=np.int64)
    if goods_initial.size:
        pv[goods_initial] = exact_ball_counts(graph, goods_initial, r0, "out",
                                              "edges", work_alive, sc, cap=cstar)
    G = _DynSet(goods_initial, n)
    P = _DynSet(goods_initial[2 * s0 * pv[goods_initial] >= m_cur], n)

    p_rate = schedule.rate(level)
    trunc = TruncExpParams(p=p_rate, a=r0, b=r1)
    log_n0 = _ceil_log2(schedule.n0)
    epochs = log_n0 + 1
    budget = s0 * 100 * log_n0
    cut_ids: list[int] = []
    exhausted = False

    for _epoch in range(epochs):
        iters_left = budget
        carved_this_epoch = False
        while iters_left > 0:
            if P.size == 0 or G.size == 0:
                exhausted = True
                break
            q = P.size / G.size
            if q < 1.0:
                ratio = math.log(rng.unit_open()) / math.log1p(-q)
                if ratio >= iters_left:  # no hit within the remaining budget
                    iters_left = 0
                    break
                iters_left -= int(ratio) + 1
            else:
                iters_left -= 1
            v = int(P.arr[rng.integer(0, P.size - 1)])
            draw_start = rng.draws
            radius = sample_trunc_exp(trunc, rng)
            stamp = sc.next_stamp()
            nm, ni, nb = K.carve_ball(graph.out.indptr, graph.out.nbrs,
                                      graph.out.lens, graph.out.eids,
                                      work_alive, v, np.int64(radius),
                                      sc.dist, sc.seen, sc.visit, stamp,
                                      sc.hd, sc.hv, sc.nodes, sc.ebuf, sc.ebuf2)
            members = sc.nodes[:nm].copy()
            cut_ids.extend(sc.ebuf2[:nb].tolist())
            result.balls.append(members)
            if collect_records:
                result.records.append(CarveRecord(
                    center=v, radius=radius, level=level, out_phase=True,
                    size=nm, stream_path=rng.path,
                    draw_start=draw_start, draw_end=rng.draws))
            # invalidate size-test values of good nodes whose r0-ball met the cut
            stamp = sc.next_stamp()
            na = K.sssp(graph.inc.indptr, graph.inc.nbrs, graph.inc.lens,
                        work_alive, members, np.int64(r0),
                        sc.dist, sc.seen, sc.visit, stamp, sc.hd, sc.hv, sc.nodes2)
            affected = sc.nodes2[:na]
            work_alive[members] = 0
            for x in members.tolist():
                G.remove(x)
                P.remove(x)
            aff = affected[G.pos[affected] >= 0]
            if aff.size:
                vc = sc.icount[:aff.size]
                ec = sc.ecount[:aff.size]
                sc.stamp = K.ball_stats_batch(
                    graph.out.indptr, graph.out.nbrs, graph.out.lens,
                    graph.out.indptr, graph.out.nbrs, graph.inc.indptr,
                    graph.inc.nbrs, work_alive, aff, np.int64(r0),
                    np.int64(cstar), sc.dist, sc.seen, sc.visit, sc.stamp,
                    sc.hd, sc.hv, vc, ec)
                pv[aff] = ec
                for x in aff[2 * s0 * pv[aff] < m_cur].tolist():
                    P.remove(x)
            carved_this_epoch = True
        if exhausted:
            break
        # re-estimation at radius r0: demote-only
        goods_now = G.members().copy()
        if config.estimator == "sampled" and goods_now.size:
            est = ball_sizes_all(graph, r0, "out", "sampled", "edges",
                                 rng=rng, k=config.sampled_k, alive=work_alive)
            b0 = est.values[goods_now]
        else:
            b0 = pv[goods_now]
        demote = goods_now[8 * s0 * b0 < 7 * m_cur]
        for x in demote.tolist():
            G.remove(x)
            P.remove(x)
        if not carved_this_epoch and demote.size == 0:
            break

    if len(result.balls) > 2 * s0:
        raise InternalFaultError("carved more than 2 s_(l-1) balls in one invocation")
    result.cut_eids = np.asarray(sorted(set(cut_ids)), dtype=np.int64)
    result.remaining = work_alive
    return result


@dataclass
class _SubResult:
    clusters: list[np.ndarray]
    cut_pairs: list[tuple[int, int]]


def _decompose(g: WeightedDigraph, D: int, rng: RngStream, m0: int, n0: int,
               delta: float, config: DecompositionConfig, stats: CarvingStats,
               depth: int, max_depth: int) -> _SubResult:
    if depth > max_depth:
        raise InternalFaultError("recursion exceeded the safety depth bound")
    stats.max_depth = max(stats.max_depth, depth)
    stats.invocations += 1
    schedule = CarvingSchedule.build(g.m, D, m0, n0, delta)
    long_mask = (4 * schedule.L) * g.length >= D
    cut_pairs: list[tuple[int, int]] = list(zip(g.tail[long_mask].tolist(),
                                                g.head[long_mask].tolist()))
    if long_mask.any():
        keep = ~long_mask
        working = WeightedDigraph.from_edge_arrays(
            g.n, g.tail[keep], g.head[keep], g.length[keep],
            length_bound=g.length_bound)
    else:
        working = g
    alive = np.ones(g.n, dtype=np.uint8)
    prefix_blocks: list[list[np.ndarray]] = []
    out_ball_blocks: list[list[np.ndarray]] = []
    scratch = Scratch(working)
    if working.m >= 2:
        rev = working.reverse()
        for level in range(schedule.L, 0, -1):
            if schedule.degenerate(level):
                continue
            for gview, is_out in ((working, True), (rev, False)):
                res = cutting_procedure(gview, schedule, level, rng, alive=alive,
                                        scratch=scratch, config=config,
                                        collect_records=stats.collect_records)
                alive = res.remaining
                if stats.collect_records:
                    for rec in res.records:
                        rec.out_phase = is_out
                    stats.carve_records.extend(res.records)
                for k in res.cut_eids.tolist():
                    cut_pairs.append((int(working.tail[k]), int(working.head[k])))
                for members in res.balls:
                    ball_sorted = np.sort(members)
                    block: list[np.ndarray] = []
                    for comp in scc_topo_scoped(working, ball_sorted, scratch):
                        if comp.shape[0] == 1:
                            block.append(comp)
                            continue
                        eids = induced_eids(working, comp, scratch)
                        child = induced_child(working, comp, eids)
                        sub = _decompose(child, D, rng.spawn(), m0, n0, delta,
                                         config, stats, depth + 1, max_depth)
                        block.extend(comp[c] for c in sub.clusters)
                        cut_pairs.extend((int(comp[u]), int(comp[v]))
                                         for (u, v) in sub.cut_pairs)
                    if is_out:
                        out_ball_blocks.append(block)
                    else:
                        prefix_blocks.append(block)
    residual = np.flatnonzero(alive).astype(np.int64)
    residual_comps = scc_topo_scoped(working, residual, scratch) if residual.size else []
    clusters: list[np.ndarray] = []
    for block in prefix_blocks:
        clusters.extend(block)
    clusters.extend(residual_comps)
    for block in reversed(out_ball_blocks):
        clusters.extend(block)
    return _SubResult(clusters=clusters, cut_pairs=cut_pairs)


def decompose_ball_carving(graph: WeightedDigraph, D: int, seed,
                           config: DecompositionConfig | None = None,
                           collect_stats: bool = False):
    """Sample an ordered low-diameter clustering of the graph.

    Returns (OrderedClustering, CarvingStats).  Deterministic given
    (graph, D, seed).
    """
    config = config or DecompositionConfig()
    if D < 1 or D > max(graph.n, 2) ** 10:
        raise GraphError(f"diameter parameter D={D} outside the polynomial range")
    rng = seed if isinstance(seed, RngStream) else RngStream(int(seed))
    m0 = graph.m
    n0 = graph.n
    delta = default_delta(m0)
    stats = CarvingStats(collect_records=collect_stats)
    max_depth = 10 * max(1, _ceil_log2(max(m0, 2)))
    sub = _decompose(graph, D, rng, m0, n0, delta, config, stats, 0, max_depth)
    clustering = OrderedClustering(clusters=sub.clusters,
                                   cut_edges=set(sub.cut_pairs), D=D)
    if config.assertion_level != "off":
        _basic_self_check(graph, clustering)
    return clustering, stats


def _basic_self_check(graph: WeightedDigraph, clustering: OrderedClustering):
    idx = clustering.cluster_index()
    if idx.shape[0] < graph.n or (idx[:graph.n] < 0).any():
        raise InternalFaultError("clustering does not cover every vertex")
    total = sum(len(c) for c in clustering.clusters)
    if total != graph.n:
        raise InternalFaultError("clusters overlap or repeat vertices")
    backward = idx[graph.tail] > idx[graph.head]
    for u, v in zip(graph.tail[backward].tolist(), graph.head[backward].tolist()):
        if (u, v) not in clustering.cut_edges:
            raise InternalFaultError(f"backward edge ({u}, {v}) missing from the cut set")
