"""Ordered clusterings: the shared output type of both decompositions.

An ordered clustering is a sequence of disjoint vertex clusters covering V
together with a cut-edge set S.  A directed edge is *cut* exactly when it
runs against the cluster order (tail in a later cluster than head); forward
cross-cluster edges are free.  S may contain extra never-backward edges, but
every backward edge must be in S.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import WeightedDigraph, scc_condensation


@dataclass
class MarkVector:
    """Per-vertex marks; a vertex is clustered (counts for the separation
    guarantee) iff its mark is 0."""

    mk: np.ndarray

    def clustered(self, v: int) -> bool:
        return not bool(self.mk[v])

    def marked_count(self) -> int:
        return int(self.mk.sum())

    def __len__(self):
        return self.mk.shape[0]


@dataclass
class OrderedClustering:
    clusters: list[np.ndarray]
    cut_edges: set[tuple[int, int]]
    D: int
    _index: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self._index is None:
            if self.clusters:
                flat = np.concatenate([np.asarray(c, dtype=np.int64)
                                       for c in self.clusters])
                reps = np.repeat(np.arange(len(self.clusters), dtype=np.int64),
                                 [len(c) for c in self.clusters])
                idx = np.full(int(flat.max()) + 1 if flat.size else 0, -1,
                              dtype=np.int64)
                idx[flat] = reps
            else:
                idx = np.empty(0, dtype=np.int64)
            self._index = idx

    def cluster_of(self, v: int) -> int:
        return int(self._index[v])

    def cluster_index(self) -> np.ndarray:
        return self._index

    def __len__(self):
        return len(self.clusters)


def is_cut(clustering: OrderedClustering, edge: tuple[int, int]) -> bool:
    """True iff the edge runs from a later cluster to a strictly earlier one."""
    u, v = edge
    return clustering.cluster_of(u) > clustering.cluster_of(v)


def cut_edge_pairs(graph: WeightedDigraph, clustering: OrderedClustering) -> set[tuple[int, int]]:
    """The exact cut set implied by the cluster order."""
    idx = clustering.cluster_index()
    back = idx[graph.tail] > idx[graph.head]
    return set(zip(graph.tail[back].tolist(), graph.head[back].tolist()))


def clustering_from_cuts(graph: WeightedDigraph, cut_edges, D: int) -> OrderedClustering:
    """Assemble the clustering induced by a cut set: strongly connected
    components of G minus the cuts, in a topological order of the
    condensation (ties by minimum contained vertex id)."""
    cuts = set((int(u), int(v)) for (u, v) in cut_edges)
    comps = scc_condensation(graph, removed_edges=cuts)
    return OrderedClustering(clusters=comps, cut_edges=cuts, D=D)


def split_to_scc_and_reorder(graph: WeightedDigraph,
                             clustering: OrderedClustering) -> OrderedClustering:
    """Refine every cluster into strongly connected components, ordering the
    pieces topologically in place of the original cluster.  The relative
    order of pieces from different original clusters is preserved."""
    out: list[np.ndarray] = []
    for c in clustering.clusters:
        if len(c) <= 1:
            out.append(np.asarray(c, dtype=np.int64))
            continue
        pieces = scc_condensation(graph, subset=c)
        if len(pieces) == 1:
            out.append(np.asarray(c, dtype=np.int64))
        else:
            out.extend(pieces)
    return OrderedClustering(clusters=out, cut_edges=set(clustering.cut_edges),
                             D=clustering.D)
