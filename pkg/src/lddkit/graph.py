"""Weighted directed graphs and shortest-path primitives.

The graph is a simple digraph (no self-loops, no parallel arcs) with positive
integer edge lengths, stored as immutable CSR arrays in both directions.
All operations here are pure functions of their inputs; graphs are safe to
share across threads after construction.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K

INF = K.INF


def _default_length_bound(n: int) -> int:
    # "polynomial in n" guard for edge lengths; generous at small n
    return max(n, 2) ** 4 + 2**32


class GraphError(ValueError):
    pass


class _Csr:
    __slots__ = ("indptr", "nbrs", "lens", "eids")

    def __init__(self, indptr, nbrs, lens, eids):
        self.indptr = indptr
        self.nbrs = nbrs
        self.lens = lens
        self.eids = eids


def _build_csr(n, key, other, lens):
    order = np.argsort(key * np.int64(max(n, 1)) + other, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, key + 1, 1)
    np.cumsum(indptr, out=indptr)
    return _Csr(indptr, other[order].copy(), lens[order].copy(), order.astype(np.int64))


class WeightedDigraph:
    """Simple weighted digraph over vertex ids 0..n-1."""

    __slots__ = ("n", "m", "tail", "head", "length", "out", "inc", "length_bound")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, int]] = (),
                 *, length_bound: int | None = None):
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 3)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise GraphError("edges must be (tail, head, length) triples")
        self._init_from_arrays(n, arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy(),
                               length_bound)

    def _init_from_arrays(self, n, tail, head, length, length_bound):
        if n < 0:
            raise GraphError("negative vertex count")
        bound = _default_length_bound(n) if length_bound is None else length_bound
        m = tail.shape[0]
        if m:
            if tail.min(initial=0) < 0 or head.min(initial=0) < 0 \
                    or tail.max(initial=-1) >= n or head.max(initial=-1) >= n:
                raise GraphError("vertex id out of range")
            if (tail == head).any():
                raise GraphError("self-loops are not allowed")
            if length.min() < 1:
                raise GraphError("edge lengths must be >= 1")
            if length.max() > bound:
                raise GraphError(f"edge length exceeds bound {bound}")
            if np.unique(tail * np.int64(n) + head).shape[0] != m:
                raise GraphError("parallel edges are not allowed")
        self.n = int(n)
        self.m = int(m)
        self.tail = tail
        self.head = head
        self.length = length
        self.length_bound = bound
        self.out = _build_csr(n, tail, head, length)
        self.inc = _build_csr(n, head, tail, length)

    @classmethod
    def from_edge_arrays(cls, n, tail, head, length, *, length_bound=None):
        g = cls.__new__(cls)
        g._init_from_arrays(int(n), np.ascontiguousarray(tail, dtype=np.int64),
                            np.ascontiguousarray(head, dtype=np.int64),
                            np.ascontiguousarray(length, dtype=np.int64), length_bound)
        return g

    def reverse(self) -> "WeightedDigraph":
        """Arc-reversed graph sharing this graph's arrays (edge ids stable)."""
        g = WeightedDigraph.__new__(WeightedDigraph)
        g.n = self.n
        g.m = self.m
        g.tail = self.head
        g.head = self.tail
        g.length = self.length
        g.length_bound = self.length_bound
        g.out = self.inc
        g.inc = self.out
        return g

    def edge_list(self):
        return list(zip(self.tail.tolist(), self.head.tolist(), self.length.tolist()))

    def degree(self, v: int) -> int:
        return self.out_degree(v) + self.in_degree(v)

    def out_degree(self, v: int) -> int:
        return int(self.out.indptr[v + 1] - self.out.indptr[v])

    def in_degree(self, v: int) -> int:
        return int(self.inc.indptr[v + 1] - self.inc.indptr[v])

    def degrees(self) -> np.ndarray:
        return (np.diff(self.out.indptr) + np.diff(self.inc.indptr)).astype(np.int64)

    def edge_id(self, u: int, v: int) -> int | None:
        lo, hi = self.out.indptr[u], self.out.indptr[u + 1]
        k = lo + np.searchsorted(self.out.nbrs[lo:hi], v)
        if k < hi and self.out.nbrs[k] == v:
            return int(self.out.eids[k])
        return None

    def has_edge(self, u: int, v: int) -> bool:
        return self.edge_id(u, v) is not None

    def __eq__(self, other):
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        if self.n != other.n or self.m != other.m:
            return False
        a = np.lexsort((self.head, self.tail))
        b = np.lexsort((other.head, other.tail))
        return bool(np.array_equal(self.tail[a], other.tail[b])
                    and np.array_equal(self.head[a], other.head[b])
                    and np.array_equal(self.length[a], other.length[b]))

    def __repr__(self):
        return f"WeightedDigraph(n={self.n}, m={self.m})"


class Scratch:
    """Reusable per-graph workspace for the kernels (not thread-shared)."""

    __slots__ = ("dist", "seen", "visit", "stamp", "hd", "hv", "nodes",
                 "nodes2", "ebuf", "ebuf2", "icount", "ecount", "n", "m",
                 "comp", "tj_index", "tj_low", "tj_onstack", "tj_stack",
                 "tj_callv", "tj_callei", "mark8")

    def __init__(self, g: WeightedDigraph):
        n, m = g.n, g.m
        self.n, self.m = n, m
        self.dist = np.zeros(n, dtype=np.int64)
        self.seen = np.zeros(n, dtype=np.int64)
        self.visit = np.zeros(n, dtype=np.int64)
        self.stamp = 0
        cap = m + n + 8
        self.hd = np.empty(cap, dtype=np.int64)
        self.hv = np.empty(cap, dtype=np.int64)
        self.nodes = np.empty(n, dtype=np.int64)
        self.nodes2 = np.empty(n, dtype=np.int64)
        self.ebuf = np.empty(m + 1, dtype=np.int64)
        self.ebuf2 = np.empty(m + 1, dtype=np.int64)
        self.icount = np.empty(n, dtype=np.int64)
        self.ecount = np.empty(n, dtype=np.int64)
        self.comp = np.empty(n, dtype=np.int64)
        self.tj_index = np.empty(n, dtype=np.int64)
        self.tj_low = np.empty(n, dtype=np.int64)
        self.tj_onstack = np.zeros(n, dtype=np.uint8)
        self.tj_stack = np.empty(n, dtype=np.int64)
        self.tj_callv = np.empty(n, dtype=np.int64)
        self.tj_callei = np.empty(n, dtype=np.int64)
        self.mark8 = np.zeros(n, dtype=np.uint8)

    def next_stamp(self) -> int:
        self.stamp += 1
        return self.stamp


def _alive_all(n: int) -> np.ndarray:
    return np.ones(n, dtype=np.uint8)


@dataclass(frozen=True)
class DistanceMap:
    """Exact shortest distances from (or to) a source set.

    Unreachable vertices carry +inf; raw int64 storage uses the INF sentinel,
    which item access converts to math.inf.
    """

    raw: np.ndarray
    sources: tuple[int, ...]
    direction: str

    def __getitem__(self, v: int):
        d = int(self.raw[v])
        return math.inf if d >= INF else d

    def reachable(self, v: int) -> bool:
        return self.raw[v] < INF

    def as_array(self) -> np.ndarray:
        return self.raw


def _run_sssp(g, sources, direction, bound, alive=None, scratch=None):
    csr = g.out if direction == "out" else g.inc
    sc = scratch or Scratch(g)
    stamp = sc.next_stamp()
    src = np.asarray(sorted(set(int(s) for s in sources)), dtype=np.int64)
    al = _alive_all(g.n) if alive is None else alive
    b = np.int64(-1 if bound is None else bound)
    cnt = K.sssp(csr.indptr, csr.nbrs, csr.lens, al, src, b,
                 sc.dist, sc.seen, sc.visit, stamp, sc.hd, sc.hv, sc.nodes)
    return sc, stamp, cnt


def dijkstra_multi(graph: WeightedDigraph, sources, direction: str = "out",
                   bound: int | None = None) -> DistanceMap:
    """Exact multi-source shortest distances, optionally pruned beyond bound.

    With a bound, vertices at distance > bound are reported unreachable and
    the search never expands past the bound (near-linear in the ball size).
    """
    src = list(sources)
    if not src:
        raise GraphError("source set must be nonempty")
    if direction not in ("out", "in"):
        raise GraphError("direction must be 'out' or 'in'")
    if bound is not None and bound < 0:
        raise GraphError("bound must be >= 0")
    for s in src:
        if not (0 <= int(s) < graph.n):
            raise GraphError("source out of range")
    sc, stamp, cnt = _run_sssp(graph, src, direction, bound)
    raw = np.full(graph.n, INF, dtype=np.int64)
    settled = sc.nodes[:cnt]
    raw[settled] = sc.dist[settled]
    return DistanceMap(raw=raw, sources=tuple(sorted(set(int(s) for s in src))),
                       direction=direction)


def ball(graph: WeightedDigraph, center: int, r: int, direction: str = "out") -> np.ndarray:
    """Vertices within distance r from center (out) or to center (in), sorted."""
    if r < 0:
        raise GraphError("radius must be >= 0")
    sc, stamp, cnt = _run_sssp(graph, [center], direction, r)
    out = np.sort(sc.nodes[:cnt].copy())
    return out


def scc_condensation(graph: WeightedDigraph, subset=None,
                     removed_edges: set | None = None) -> list[np.ndarray]:
    """Strongly connected components in a topological order of the condensation.

    Within the order, incomparable components are ranked by their minimum
    vertex id (deterministic).  Optionally restricted to an induced vertex
    subset and/or ignoring a set of (u, v) edges.
    """
    n = graph.n
    if subset is None:
        sub = np.arange(n, dtype=np.int64)
    else:
        sub = np.asarray(sorted(set(int(v) for v in subset)), dtype=np.int64)
    if sub.size == 0:
        return []
    node_in = np.zeros(n, dtype=np.uint8)
    node_in[sub] = 1
    if removed_edges:
        edge_ok = np.ones(graph.m, dtype=np.uint8)
        for (u, v) in removed_edges:
            k = graph.edge_id(int(u), int(v))
            if k is not None:
                edge_ok[k] = 0
        use_ok = 1
    else:
        edge_ok = np.empty(0, dtype=np.uint8)
        use_ok = 0
    comp = np.full(n, -1, dtype=np.int64)
    index = np.empty(n, dtype=np.int64)
    lowlink = np.empty(n, dtype=np.int64)
    onstack = np.zeros(n, dtype=np.uint8)
    stack = np.empty(sub.size, dtype=np.int64)
    call_v = np.empty(sub.size, dtype=np.int64)
    call_ei = np.empty(sub.size, dtype=np.int64)
    ncomp = K.tarjan_scc(graph.out.indptr, graph.out.nbrs, graph.out.eids,
                         edge_ok, use_ok, node_in, sub, comp,
                         index, lowlink, onstack, stack, call_v, call_ei)
    return _order_components(graph, sub, comp, int(ncomp), edge_ok if use_ok else None)


def _order_components(graph, sub, comp, ncomp, edge_ok) -> list[np.ndarray]:
    """Topological order of the condensation, ties by min contained vertex id."""
    members: list[list[int]] = [[] for _ in range(ncomp)]
    for v in sub.tolist():
        members[comp[v]].append(v)
    min_vertex = [ms[0] for ms in members]  # sub iterated ascending
    tails, heads = graph.tail, graph.head
    mask = (comp[tails] >= 0) & (comp[heads] >= 0)
    if edge_ok is not None:
        mask &= edge_ok.astype(bool)
    cu = comp[tails[mask]]
    cv = comp[heads[mask]]
    cross = cu != cv
    cu, cv = cu[cross], cv[cross]
    if cu.size:
        pair = np.unique(cu * np.int64(ncomp) + cv)
        cu = (pair // ncomp).astype(np.int64)
        cv = (pair % ncomp).astype(np.int64)
    indeg = np.zeros(ncomp, dtype=np.int64)
    np.add.at(indeg, cv, 1)
    adj: list[list[int]] = [[] for _ in range(ncomp)]
    for a, b in zip(cu.tolist(), cv.tolist()):
        adj[a].append(b)
    ready = [(min_vertex[c], c) for c in range(ncomp) if indeg[c] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        _, c = heapq.heappop(ready)
        order.append(c)
        for b in adj[c]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(ready, (min_vertex[b], b))
    return [np.asarray(members[c], dtype=np.int64) for c in order]


def induced_eids(graph: WeightedDigraph, members_sorted: np.ndarray,
                 scratch: Scratch) -> np.ndarray:
    """Edge ids with both endpoints in the (sorted) member set; O(volume)."""
    stamp = scratch.next_stamp()
    cnt = K.collect_induced_eids(graph.out.indptr, graph.out.nbrs, graph.out.eids,
                                 members_sorted, scratch.visit, stamp, scratch.ebuf)
    return scratch.ebuf[:cnt].copy()


def induced_child(graph: WeightedDigraph, members_sorted: np.ndarray,
                  eids: np.ndarray) -> WeightedDigraph:
    """Induced subgraph over sorted members from precollected edge ids;
    child vertex i corresponds to members_sorted[i]."""
    local_tail = np.searchsorted(members_sorted, graph.tail[eids])
    local_head = np.searchsorted(members_sorted, graph.head[eids])
    return WeightedDigraph.from_edge_arrays(
        members_sorted.shape[0], local_tail, local_head, graph.length[eids],
        length_bound=graph.length_bound)


def scc_topo_scoped(graph: WeightedDigraph, sub_sorted: np.ndarray,
                    scratch: Scratch) -> list[np.ndarray]:
    """scc_condensation restricted to a subset, touching only the subset and
    its induced edges (scratch-backed; no O(n + m) passes)."""
    size = sub_sorted.shape[0]
    if size == 0:
        return []
    if size == 1:
        return [sub_sorted.copy()]
    sc = scratch
    eids = induced_eids(graph, sub_sorted, sc)
    if eids.shape[0] == 0:
        # edgeless: singletons, ascending ids (consistent with min-id ties)
        return [sub_sorted[i:i + 1].copy() for i in range(size)]
    sc.mark8[sub_sorted] = 1
    no_filter = np.empty(0, dtype=np.uint8)
    ncomp = K.tarjan_scc(graph.out.indptr, graph.out.nbrs, graph.out.eids,
                         no_filter, 0, sc.mark8, sub_sorted, sc.comp,
                         sc.tj_index, sc.tj_low, sc.tj_onstack,
                         sc.tj_stack, sc.tj_callv, sc.tj_callei)
    sc.mark8[sub_sorted] = 0
    if ncomp == 1:
        return [sub_sorted.copy()]
    members: list[list[int]] = [[] for _ in range(ncomp)]
    comp = sc.comp
    for v in sub_sorted.tolist():
        members[comp[v]].append(v)
    min_vertex = [ms[0] for ms in members]
    pairs = set()
    for k in eids.tolist():
        a, b = comp[graph.tail[k]], comp[graph.head[k]]
        if a != b:
            pairs.add((int(a), int(b)))
    indeg = [0] * ncomp
    adj: list[list[int]] = [[] for _ in range(ncomp)]
    for a, b in pairs:
        adj[a].append(b)
        indeg[b] += 1
    ready = [(min_vertex[c], c) for c in range(ncomp) if indeg[c] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        _, c = heapq.heappop(ready)
        order.append(c)
        for b in adj[c]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(ready, (min_vertex[b], b))
    return [np.asarray(members[c], dtype=np.int64) for c in order]


def weak_diameter(graph: WeightedDigraph, subset, bound: int | None = None):
    """Max dist_G(u, v) over ordered pairs in subset, in the full ambient graph.

    Returns math.inf when some pair is unreachable (or beyond bound if given).
    """
    sub = np.asarray(sorted(set(int(v) for v in subset)), dtype=np.int64)
    if sub.size == 0:
        raise GraphError("subset must be nonempty")
    in_sub = np.zeros(graph.n, dtype=np.uint8)
    in_sub[sub] = 1
    sc = Scratch(graph)
    b = np.int64(-1 if bound is None else bound)
    val, sc.stamp = K.eccentricity_bound(graph.out.indptr, graph.out.nbrs, graph.out.lens,
                                         _alive_all(graph.n), sub, in_sub, b,
                                         sc.dist, sc.seen, sc.visit, sc.stamp,
                                         sc.hd, sc.hv, sc.nodes)
    return math.inf if val >= INF else int(val)


def induced_subgraph(graph: WeightedDigraph, subset):
    """Materialized induced subgraph plus the child-to-parent id mapping."""
    sub = np.asarray(sorted(set(int(v) for v in subset)), dtype=np.int64)
    local = np.full(graph.n, -1, dtype=np.int64)
    local[sub] = np.arange(sub.size, dtype=np.int64)
    mask = np.zeros(graph.n, dtype=bool)
    mask[sub] = True
    keep = mask[graph.tail] & mask[graph.head]
    child = WeightedDigraph.from_edge_arrays(
        sub.size, local[graph.tail[keep]], local[graph.head[keep]],
        graph.length[keep], length_bound=graph.length_bound)
    return child, sub


def reverse(graph: WeightedDigraph) -> WeightedDigraph:
    return graph.reverse()


def edges_within(graph: WeightedDigraph, subset) -> int:
    """Number of edges with both endpoints in subset."""
    mask = np.zeros(graph.n, dtype=bool)
    idx = [int(v) for v in subset]
    if idx:
        mask[idx] = True
    return int(np.count_nonzero(mask[graph.tail] & mask[graph.head]))
