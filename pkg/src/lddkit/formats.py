"""File formats: 9th-DIMACS shortest-path graphs in, JSON clusterings out.

DIMACS .gr: comment lines ``c ...``, one header ``p sp <n> <m>``, arcs
``a <u> <v> <w>`` with 1-based vertex ids and positive integer weights.
Self-loops, duplicate arcs, and count mismatches are rejected with the
offending line number.
"""

from __future__ import annotations

import json

import numpy as np

from .clustering import MarkVector, OrderedClustering
from .graph import GraphError, WeightedDigraph


class DimacsFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_dimacs_gr(text: str) -> WeightedDigraph:
    n = m = None
    tails: list[int] = []
    heads: list[int] = []
    lens: list[int] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if fields[0] == "p":
            if n is not None:
                raise DimacsFormatError("duplicate problem header", lineno)
            if len(fields) != 4 or fields[1] != "sp":
                raise DimacsFormatError("malformed header, expected 'p sp <n> <m>'", lineno)
            try:
                n, m = int(fields[2]), int(fields[3])
            except ValueError:
                raise DimacsFormatError("non-integer header fields", lineno) from None
            if n < 0 or m < 0:
                raise DimacsFormatError("negative counts in header", lineno)
        elif fields[0] == "a":
            if n is None:
                raise DimacsFormatError("arc before the problem header", lineno)
            if len(fields) != 4:
                raise DimacsFormatError("malformed arc, expected 'a <u> <v> <w>'", lineno)
            try:
                u, v, w = int(fields[1]), int(fields[2]), int(fields[3])
            except ValueError:
                raise DimacsFormatError("non-integer arc fields", lineno) from None
            if not (1 <= u <= n) or not (1 <= v <= n):
                raise DimacsFormatError(f"vertex id out of range [1, {n}]", lineno)
            if u == v:
                raise DimacsFormatError("self-loop", lineno)
            if w < 1:
                raise DimacsFormatError("arc weight must be >= 1", lineno)
            if (u, v) in seen:
                raise DimacsFormatError(f"duplicate arc ({u}, {v})", lineno)
            seen.add((u, v))
            tails.append(u - 1)
            heads.append(v - 1)
            lens.append(w)
        else:
            raise DimacsFormatError(f"unknown line type {fields[0]!r}", lineno)
    if n is None:
        raise DimacsFormatError("missing problem header", 1)
    if len(tails) != m:
        raise DimacsFormatError(f"header promised {m} arcs, found {len(tails)}",
                                len(text.splitlines()) or 1)
    try:
        return WeightedDigraph.from_edge_arrays(
            n, np.asarray(tails, dtype=np.int64), np.asarray(heads, dtype=np.int64),
            np.asarray(lens, dtype=np.int64))
    except GraphError as exc:
        raise DimacsFormatError(str(exc), 1) from exc


def write_dimacs_gr(graph: WeightedDigraph) -> str:
    lines = [f"p sp {graph.n} {graph.m}"]
    for u, v, w in zip(graph.tail.tolist(), graph.head.tolist(), graph.length.tolist()):
        lines.append(f"a {u + 1} {v + 1} {w}")
    return "\n".join(lines) + "\n"


def write_clustering_json(clustering: OrderedClustering,
                          marks: MarkVector | None = None,
                          seed: int | None = None,
                          algorithm: str | None = None) -> str:
    doc = {
        "D": clustering.D,
        "clusters": [[int(v) for v in c] for c in clustering.clusters],
        "cut_edges": sorted([int(u), int(v)] for (u, v) in clustering.cut_edges),
    }
    if marks is not None:
        doc["marks"] = [int(x) for x in marks.mk.tolist()]
    if seed is not None:
        doc["seed"] = int(seed)
    if algorithm is not None:
        doc["algorithm"] = algorithm
    return json.dumps(doc, indent=1) + "\n"


def read_clustering_json(text: str):
    """Returns (OrderedClustering, MarkVector | None, metadata dict)."""
    doc = json.loads(text)
    clusters = [np.asarray(c, dtype=np.int64) for c in doc["clusters"]]
    cuts = set((int(u), int(v)) for u, v in doc["cut_edges"])
    clustering = OrderedClustering(clusters=clusters, cut_edges=cuts, D=int(doc["D"]))
    marks = None
    if "marks" in doc:
        marks = MarkVector(mk=np.asarray(doc["marks"], dtype=np.uint8))
    meta = {k: doc[k] for k in ("seed", "algorithm") if k in doc}
    return clustering, marks, meta
