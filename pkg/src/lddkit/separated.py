"""Directed low-diameter decomposition with separation marking.

Random-order ball cutting: each invocation labels vertices heavy or light by
the edge mass of their radius-D/8 balls, then either runs alternating
in/out iterations of randomly ordered ball cuts (when one heavy kind is
absent), or splits off a heavy region first.  Every cut marks the vertices
within distance d of its boundary, on both sides, so that unmarked vertices
of differently ordered clusters end up more than d apart.  The separation
parameter d influences marks only; with the seed fixed, the clustering and
hence the cut set are identical for every d.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .ballsize import exact_ball_counts
from .clustering import (MarkVector, OrderedClustering, cut_edge_pairs,
                         split_to_scc_and_reorder)
from .config import DecompositionConfig
from .graph import (GraphError, Scratch, WeightedDigraph, induced_child,
                    induced_eids, scc_condensation)
from .randomness import InternalFaultError, RngStream, sample_uniform_int

_MAX_DEPTH = 200


class RegimeWarning(UserWarning):
    """The parameters left the regime where the guarantees are meaningful
    (degenerate radius windows, or separation too large for the diameter)."""


@dataclass(frozen=True)
class SeparationSchedule:
    """Iteration radii: level i samples an integer radius in (a_i, a_{i-1}],
    where a_i = D/8 - sum_{j<=i} D/16 * max(1/L, 2^-j)."""

    D: int
    d: int
    L: int
    a: tuple[Fraction, ...]
    degenerate: bool

    @classmethod
    def build(cls, m_inv: int, D: int, d: int):
        if m_inv <= 2:
            L = 1
        else:
            L = max(1, math.ceil(math.log2(math.log2(m_inv))))
        a = [Fraction(D, 8)]
        acc = Fraction(0)
        for j in range(1, L + 1):
            acc += max(Fraction(1, L), Fraction(1, 2 ** j))
            a.append(Fraction(D, 8) - Fraction(D, 16) * acc)
        if a[-1] < 0:
            raise InternalFaultError("radius schedule went negative")
        degenerate = any(math.floor(a[i - 1]) <= math.floor(a[i]) for i in range(1, L + 1))
        return cls(D=D, d=d, L=L, a=tuple(a), degenerate=degenerate)

    def window(self, i: int) -> tuple[int, int]:
        """Integer support (lo exclusive, hi inclusive) for iteration i,
        clamped to width >= 1 when degenerate."""
        lo = math.floor(self.a[i])
        hi = max(math.floor(self.a[i - 1]), lo + 1)
        return lo, hi


@dataclass
class HeavyLightLabels:
    in_heavy: np.ndarray  # uint8 per vertex
    out_heavy: np.ndarray

    def in_heavy_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.in_heavy).astype(np.int64)

    def out_heavy_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.out_heavy).astype(np.int64)


def label_heavy_light(graph: WeightedDigraph, D: int) -> HeavyLightLabels:
    """Exact heavy/light labels: v is in-heavy iff its in-ball of radius D/8
    induces at least half of all edges (symmetrically for out)."""
    n, m = graph.n, graph.m
    if m == 0:
        z = np.zeros(n, dtype=np.uint8)
        return HeavyLightLabels(in_heavy=z, out_heavy=z.copy())
    radius = D // 8
    cap = (m + 1) // 2
    targets = np.arange(n, dtype=np.int64)
    sc = Scratch(graph)
    e_in = exact_ball_counts(graph, targets, radius, "in", "edges", scratch=sc, cap=cap)
    e_out = exact_ball_counts(graph, targets, radius, "out", "edges", scratch=sc, cap=cap)
    return HeavyLightLabels(in_heavy=(2 * e_in >= m).astype(np.uint8),
                            out_heavy=(2 * e_out >= m).astype(np.uint8))


@dataclass
class IterationRecord:
    depth: int
    i: int
    direction: str  # '-' or '+'
    sampled: int
    radius: int


@dataclass
class SeparationStats:
    invocations: int = 0
    max_depth: int = 0
    cases: list = field(default_factory=list)  # (depth, 'iters-'/'iters+'/'a'/'b-in'/'b-out')
    iterations: list = field(default_factory=list)
    leftover_singletons: int = 0
    collect: bool = False


class _Env:
    __slots__ = ("D", "d", "m0", "ln_mD", "config", "stats")

    def __init__(self, D, d, m0, config, stats):
        self.D = D
        self.d = d
        self.m0 = m0
        self.ln_mD = math.log(max(m0, 2) * D)
        self.config = config
        self.stats = stats


def _base_case(g: WeightedDigraph) -> list[np.ndarray]:
    # m <= 1: singleton clustering induced by a topological order
    return scc_condensation(g)


def _decompose_sep(g: WeightedDigraph, rng: RngStream, env: _Env, depth: int):
    if depth > _MAX_DEPTH:
        raise InternalFaultError("separated decomposition exceeded the depth cap")
    stats = env.stats
    stats.invocations += 1
    stats.max_depth = max(stats.max_depth, depth)
    n, m = g.n, g.m
    mk = np.zeros(n, dtype=np.uint8)
    if m <= 1:
        return _base_case(g), mk
    D, d = env.D, env.d
    schedule = SeparationSchedule.build(m, D, d)
    if schedule.degenerate:
        warnings.warn("radius windows collapsed (D too small); clamped to width 1",
                      RegimeWarning, stacklevel=2)
    labels = label_heavy_light(g, D)
    sc = Scratch(g)
    U = np.ones(n, dtype=np.uint8)
    alive_all = np.ones(n, dtype=np.uint8)
    minus_blocks: list[list[np.ndarray]] = []
    plus_blocks: list[list[np.ndarray]] = []
    state = (g, sc, alive_all, U, mk, minus_blocks, plus_blocks, rng, env, depth)
    in_h = labels.in_heavy_vertices()
    out_h = labels.out_heavy_vertices()
    if in_h.size == 0:
        if stats.collect:
            stats.cases.append((depth, "iters-"))
        _iteration_loop(state, schedule, first_minus=True)
    elif out_h.size == 0:
        if stats.collect:
            stats.cases.append((depth, "iters+"))
        _iteration_loop(state, schedule, first_minus=False)
    else:
        pair = _find_heavy_pair(g, sc, in_h, out_h, D)
        if pair is not None:
            if stats.collect:
                stats.cases.append((depth, "a"))
            _case_heavy_pair(state, pair)
        else:
            _case_heavy_disjoint(state, schedule, in_h, out_h)
    # vertices never sampled nor swallowed become singleton clusters; they
    # have no incident edges in this instance, so any slot is order-valid
    leftovers = np.flatnonzero(U).astype(np.int64)
    if leftovers.size:
        if env.config.assertion_level == "debug":
            degs = g.degrees()
            if degs[leftovers].max(initial=0) > 0:
                raise InternalFaultError("a vertex with edges survived all iterations")
        stats.leftover_singletons += int(leftovers.size)
        minus_blocks.append([np.asarray([v], dtype=np.int64) for v in leftovers.tolist()])
    clusters: list[np.ndarray] = []
    for block in minus_blocks:
        clusters.extend(block)
    for block in reversed(plus_blocks):
        clusters.extend(block)
    return clusters, mk


def _find_heavy_pair(g, sc, in_h, out_h, D):
    """Smallest-id in-heavy s reaching some out-heavy t within D/4, with the
    smallest such t; None when every pair is further apart."""
    bound = np.int64(D // 4)
    is_out_h = np.zeros(g.n, dtype=np.uint8)
    is_out_h[out_h] = 1
    alive = np.ones(g.n, dtype=np.uint8)
    for s in in_h.tolist():
        stamp = sc.next_stamp()
        cnt = K.sssp(g.out.indptr, g.out.nbrs, g.out.lens, alive,
                     np.asarray([s], dtype=np.int64), bound,
                     sc.dist, sc.seen, sc.visit, stamp, sc.hd, sc.hv, sc.nodes)
        settled = sc.nodes[:cnt]
        hits = settled[is_out_h[settled] == 1]
        if hits.size:
            return s, int(hits.min())
    return None


def _ball_with_annulus(g, sc, alive, centers, radius, d, direction):
    """One bounded search to radius+d; returns (ball, annulus) vertex arrays,
    distances taken in the full instance graph."""
    csr = g.inc if direction == "in" else g.out
    stamp = sc.next_stamp()
    cnt = K.sssp(csr.indptr, csr.nbrs, csr.lens, alive, centers,
                 np.int64(radius + d), sc.dist, sc.seen, sc.visit, stamp,
                 sc.hd, sc.hv, sc.nodes)
    settled = sc.nodes[:cnt]
    dvals = sc.dist[settled]
    ball = settled[dvals <= radius]
    annulus = settled[dvals > radius - d] if d > 0 else settled[:0]
    return np.sort(ball), annulus


def _recurse_on(members: np.ndarray, state):
    """Run the algorithm on the induced subgraph of sorted members; returns
    clusters mapped to this instance's ids, merging child marks."""
    g, sc, _alive, _U, mk, _mb, _pb, rng, env, depth = state
    if members.shape[0] == 0:
        return []
    eids = induced_eids(g, members, sc)
    if eids.shape[0] <= 1:
        # base case inline: topological singleton order, no marks, no draws
        if eids.shape[0] == 0:
            return [np.asarray([v], dtype=np.int64) for v in members.tolist()]
        child = induced_child(g, members, eids)
        return [members[c] for c in _base_case(child)]
    child = induced_child(g, members, eids)
    sub_clusters, sub_mk = _decompose_sep(child, rng.spawn(), env, depth + 1)
    mk[members] |= sub_mk
    return [members[c] for c in sub_clusters]


def _iteration_loop(state, schedule, first_minus: bool):
    """Iterations i = 1..L, alternating direction, first one minus (in-balls)
    or plus (out-balls).  Each sampled center in random order: mark the
    annulus around its ball boundary, recurse on the ball inside U, drop the
    ball from U."""
    g, sc, alive_all, U, mk, minus_blocks, plus_blocks, rng, env, depth = state
    degs = g.degrees().astype(np.float64)
    m = g.m
    stats = env.stats
    for i in range(1, schedule.L + 1):
        minus = (i % 2 == 1) if first_minus else (i % 2 == 0)
        lo, hi = schedule.window(i)
        r_i = sample_uniform_int(lo, hi, rng)
        members_u = np.flatnonzero(U).astype(np.int64)
        prob = np.minimum(1.0, (2.0 * degs[members_u] / m) * (2.0 ** (2 ** i)) * env.ln_mD)
        sampled = members_u[rng.random(members_u.shape[0]) < prob]
        order = rng.permutation(sampled)
        if stats.collect:
            stats.iterations.append(IterationRecord(
                depth=depth, i=i, direction="-" if minus else "+",
                sampled=int(sampled.shape[0]), radius=r_i))
        for v in order.tolist():
            if U[v] == 0:
                continue
            ball_all, annulus = _ball_with_annulus(
                g, sc, alive_all, np.asarray([v], dtype=np.int64),
                r_i, env.d, "in" if minus else "out")
            if annulus.size:
                ann_u = annulus[U[annulus] == 1]
                mk[ann_u] = 1
            B = ball_all[U[ball_all] == 1]
            if B.size == 0:
                continue
            placed = _recurse_on(B, state)
            U[B] = 0
            if minus:
                minus_blocks.append(placed)
            else:
                plus_blocks.append(placed)
            if env.config.assertion_level == "debug":
                _assert_annulus_marked(g, sc, alive_all, U, mk,
                                       np.asarray([v], dtype=np.int64),
                                       r_i, env.d, "in" if minus else "out")


def _case_heavy_pair(state, pair):
    """Heavy vertices s (in) and t (out) within D/4 of each other: split off
    the complement of s's in-ball, then the in-ball minus t's out-ball, and
    keep the intersection as a single cluster of diameter at most D."""
    g, sc, alive_all, U, mk, minus_blocks, plus_blocks, rng, env, depth = state
    D, d = env.D, env.d
    s, t = pair
    lo, hi = D // 8, max(D // 4, D // 8 + 1)
    if D // 4 <= D // 8:
        warnings.warn("heavy-pair radius window collapsed (D too small)",
                      RegimeWarning, stacklevel=2)
    r = sample_uniform_int(lo, hi, rng)
    bin_s, ann_s = _ball_with_annulus(g, sc, alive_all,
                                      np.asarray([s], dtype=np.int64), r, d, "in")
    mk[ann_s] = 1
    in_bin = np.zeros(g.n, dtype=bool)
    in_bin[bin_s] = True
    complement = np.flatnonzero(~in_bin).astype(np.int64)
    plus_blocks.append(_recurse_on(complement, state))
    bout_t, ann_t = _ball_with_annulus(g, sc, alive_all,
                                       np.asarray([t], dtype=np.int64), r, d, "out")
    if ann_t.size:
        ann_t = ann_t[in_bin[ann_t]]
        mk[ann_t] = 1
    in_bout = np.zeros(g.n, dtype=bool)
    in_bout[bout_t] = True
    rec2 = bin_s[~in_bout[bin_s]]
    central = bin_s[in_bout[bin_s]]
    minus_blocks.append(_recurse_on(rec2, state))
    if central.size:
        minus_blocks.append([central])
    U[:] = 0
    if env.stats.collect:
        env.stats.cases.append((depth, f"a:r={r}"))


def _case_heavy_disjoint(state, schedule, in_h, out_h):
    """Both heavy kinds exist but every pair is more than D/4 apart: carve
    the union of balls on the side with fewer induced edges (ties keep the
    in-union), then continue with the iteration loop on the rest."""
    g, sc, alive_all, U, mk, minus_blocks, plus_blocks, rng, env, depth = state
    D, d = env.D, env.d
    lo, hi = D // 16, max(D // 8, D // 16 + 1)
    if D // 8 <= D // 16:
        warnings.warn("heavy-disjoint radius window collapsed (D too small)",
                      RegimeWarning, stacklevel=2)
    r = sample_uniform_int(lo, hi, rng)
    # in-ball union around out-heavy vertices; out-ball union around in-heavy
    bin_u, ann_in = _ball_with_annulus(g, sc, alive_all, out_h, r, d, "in")
    bout_u, ann_out = _ball_with_annulus(g, sc, alive_all, in_h, r, d, "out")
    if env.config.assertion_level == "debug":
        if np.intersect1d(bin_u, bout_u).size:
            raise InternalFaultError("heavy ball unions intersect in case (b)")
    e_bin = induced_eids(g, bin_u, sc).shape[0]
    e_bout = induced_eids(g, bout_u, sc).shape[0]
    if e_bin >= e_bout:
        mk[ann_out] = 1
        plus_blocks.append(_recurse_on(bout_u, state))
        U[bout_u] = 0
        if env.stats.collect:
            env.stats.cases.append((depth, f"b-out:r={r}"))
        _iteration_loop(state, schedule, first_minus=True)
    else:
        mk[ann_in] = 1
        minus_blocks.append(_recurse_on(bin_u, state))
        U[bin_u] = 0
        if env.stats.collect:
            env.stats.cases.append((depth, f"b-in:r={r}"))
        _iteration_loop(state, schedule, first_minus=False)


def _assert_annulus_marked(g, sc, alive_all, U, mk, centers, radius, d, direction):
    _ball, annulus = _ball_with_annulus(g, sc, alive_all, centers, radius, d, direction)
    ann_u = annulus[U[annulus] == 1]
    if ann_u.size and not mk[ann_u].all():
        raise InternalFaultError("annulus vertex left unmarked after a cut")


def regime_bound_ok(m: int, D: int, d: int) -> bool:
    lhat = max(1, math.ceil(math.log2(math.log2(max(m, 4)))))
    return 4 * lhat * d <= D


def decompose_separated(graph: WeightedDigraph, D: int, d: int, seed,
                        config: DecompositionConfig | None = None,
                        collect_stats: bool = False):
    """Sample an ordered clustering plus marks with separation d.

    Returns (OrderedClustering, MarkVector, SeparationStats).  Clusters are
    split into strongly connected components in a final pass; the cut set is
    derived from the final order (exactly the backward edges).  Deterministic
    given (graph, D, d, seed); the cut set does not depend on d.
    """
    config = config or DecompositionConfig()
    if D < 1 or D > max(graph.n, 2) ** 10:
        raise GraphError(f"diameter parameter D={D} outside the polynomial range")
    if d < 0:
        raise GraphError("separation parameter d must be >= 0")
    if not regime_bound_ok(graph.m, D, d):
        warnings.warn(f"separation d={d} is large for D={D}; the clustering "
                      "probability guarantee is vacuous in this regime",
                      RegimeWarning, stacklevel=2)
    rng = seed if isinstance(seed, RngStream) else RngStream(int(seed))
    stats = SeparationStats(collect=collect_stats)
    env = _Env(D=D, d=d, m0=graph.m, config=config, stats=stats)
    clusters, mk = _decompose_sep(graph, rng, env, 0)
    raw = OrderedClustering(clusters=clusters, cut_edges=set(), D=D)
    refined = split_to_scc_and_reorder(graph, raw)
    cuts = cut_edge_pairs(graph, refined)
    clustering = OrderedClustering(clusters=refined.clusters, cut_edges=cuts, D=D)
    marks = MarkVector(mk=mk)
    if config.assertion_level != "off":
        _self_check(graph, clustering, marks, d)
    return clustering, marks, stats


def _self_check(graph, clustering, marks, d):
    idx = clustering.cluster_index()
    if idx.shape[0] < graph.n or (idx[:graph.n] < 0).any():
        raise InternalFaultError("clustering does not cover every vertex")
    if sum(len(c) for c in clustering.clusters) != graph.n:
        raise InternalFaultError("clusters overlap or repeat vertices")
    # exact separation: no unmarked vertex reaches an unmarked vertex of an
    # earlier cluster within distance d
    if d > 0:
        sc = Scratch(graph)
        alive = np.ones(graph.n, dtype=np.uint8)
        unmarked = marks.mk == 0
        for ci, cluster in enumerate(clustering.clusters):
            src = cluster[unmarked[cluster]]
            if src.size == 0:
                continue
            stamp = sc.next_stamp()
            cnt = K.sssp(graph.out.indptr, graph.out.nbrs, graph.out.lens, alive,
                         src.astype(np.int64), np.int64(d), sc.dist, sc.seen,
                         sc.visit, stamp, sc.hd, sc.hv, sc.nodes)
            reached = sc.nodes[:cnt]
            bad = reached[(idx[reached] < ci) & unmarked[reached]]
            if bad.size:
                raise InternalFaultError(
                    f"separation violated: cluster {ci} reaches vertex {int(bad[0])}")
    # every cut edge of length <= d has both endpoints marked
    if d > 0:
        for (u, v) in clustering.cut_edges:
            k = graph.edge_id(u, v)
            if k is not None and graph.length[k] <= d:
                if not (marks.mk[u] and marks.mk[v]):
                    raise InternalFaultError(
                        f"short edge ({u}, {v}) cut with an unmarked endpoint")
