"""Graph generators for experiments and tests.

All generators produce unit lengths except ``random``, which takes a length
range.  The star-cycle family is the strongly connected worst case for
out-ball preservation: one hub reaches everything in a single hop while the
way back goes around the whole cycle, so its diameter is n - 1.
"""

from __future__ import annotations

import numpy as np

from .graph import WeightedDigraph
from .randomness import RngStream


def path(n: int) -> WeightedDigraph:
    """Unit-length directed path 0 -> 1 -> ... -> n-1."""
    return WeightedDigraph(n, [(i, i + 1, 1) for i in range(n - 1)])


def cycle(n: int) -> WeightedDigraph:
    """Unit-length directed cycle on n >= 2 vertices."""
    if n < 2:
        raise ValueError("a directed cycle needs at least 2 vertices")
    return WeightedDigraph(n, [(i, (i + 1) % n, 1) for i in range(n)])


def bipath(n: int) -> WeightedDigraph:
    """Bidirected unit path: each undirected edge as two arcs."""
    edges = []
    for i in range(n - 1):
        edges.append((i, i + 1, 1))
        edges.append((i + 1, i, 1))
    return WeightedDigraph(n, edges)


def grid(k: int) -> WeightedDigraph:
    """Bidirected k x k grid with unit lengths."""
    def vid(r, c):
        return r * k + c
    edges = []
    for r in range(k):
        for c in range(k):
            if c + 1 < k:
                edges.append((vid(r, c), vid(r, c + 1), 1))
                edges.append((vid(r, c + 1), vid(r, c), 1))
            if r + 1 < k:
                edges.append((vid(r, c), vid(r + 1, c), 1))
                edges.append((vid(r + 1, c), vid(r, c), 1))
    return WeightedDigraph(k * k, edges)


def star_cycle(n: int) -> WeightedDigraph:
    """Directed n-cycle plus arcs from vertex 0 to every other vertex."""
    if n < 2:
        raise ValueError("star_cycle needs at least 2 vertices")
    edges = [(i, (i + 1) % n, 1) for i in range(n)]
    edges += [(0, j, 1) for j in range(2, n)]
    return WeightedDigraph(n, edges)


def random_digraph(n: int, p: float, rng: RngStream,
                   length_range: tuple[int, int] = (1, 1)) -> WeightedDigraph:
    """Erdos-Renyi digraph: each ordered pair (u, v), u != v, independently
    with probability p; lengths uniform over the closed range.  Sparse
    sampling: per-tail binomial counts then distinct targets."""
    if n < 0 or not (0.0 <= p <= 1.0):
        raise ValueError("need n >= 0 and 0 <= p <= 1")
    lo, hi = length_range
    if lo < 1 or hi < lo:
        raise ValueError("invalid length range")
    tails: list[np.ndarray] = []
    heads: list[np.ndarray] = []
    gen = rng.generator
    for u in range(n):
        k = int(gen.binomial(n - 1, p)) if n > 1 and p > 0 else 0
        if k == 0:
            continue
        targets = gen.choice(n - 1, size=k, replace=False)
        targets = targets + (targets >= u)  # skip the diagonal
        tails.append(np.full(k, u, dtype=np.int64))
        heads.append(targets.astype(np.int64))
    if tails:
        tail = np.concatenate(tails)
        head = np.concatenate(heads)
    else:
        tail = np.empty(0, dtype=np.int64)
        head = np.empty(0, dtype=np.int64)
    rng.draws += 2 * n + tail.shape[0]
    if hi == lo:
        lens = np.full(tail.shape[0], lo, dtype=np.int64)
    else:
        lens = gen.integers(lo, hi + 1, size=tail.shape[0]).astype(np.int64)
    return WeightedDigraph.from_edge_arrays(n, tail, head, lens)


def generate(kind: str, n: int = 0, k: int = 0, p: float = 0.0,
             seed: int | None = None,
             length_range: tuple[int, int] = (1, 1)) -> WeightedDigraph:
    """Dispatch by kind: path | cycle | bipath | grid | random | star_cycle."""
    if kind == "path":
        return path(n)
    if kind == "cycle":
        return cycle(n)
    if kind == "bipath":
        return bipath(n)
    if kind == "grid":
        return grid(k if k else int(round(n ** 0.5)))
    if kind == "star_cycle":
        return star_cycle(n)
    if kind == "random":
        if seed is None:
            raise ValueError("random graphs need a seed")
        return random_digraph(n, p, RngStream(seed), length_range)
    raise ValueError(f"unknown generator kind {kind!r}")
