"""Low-level graph kernels (numba JIT, cached).

All kernels operate on CSR arrays and reusable scratch buffers so that the
decomposition inner loops never allocate per call.  Stamp arrays (``seen``,
``visit``) are invalidated by bumping the stamp value instead of clearing.

Distances are exact int64; ``INF`` is a sentinel strictly larger than any
achievable path length (n * max_length stays far below it).
"""

from __future__ import annotations

import numpy as np
from numba import njit

INF = np.int64(2**62)


@njit(cache=True, inline="always")
def _heap_push(hd, hv, hn, d, v):
    hd[hn] = d
    hv[hn] = v
    j = hn
    while j > 0:
        p = (j - 1) >> 1
        if hd[p] > hd[j]:
            hd[p], hd[j] = hd[j], hd[p]
            hv[p], hv[j] = hv[j], hv[p]
            j = p
        else:
            break
    return hn + 1


@njit(cache=True, inline="always")
def _heap_pop(hd, hv, hn):
    d = hd[0]
    v = hv[0]
    hn -= 1
    hd[0] = hd[hn]
    hv[0] = hv[hn]
    j = 0
    while True:
        l = 2 * j + 1
        if l >= hn:
            break
        r = l + 1
        m = l
        if r < hn and hd[r] < hd[l]:
            m = r
        if hd[m] < hd[j]:
            hd[m], hd[j] = hd[j], hd[m]
            hv[m], hv[j] = hv[j], hv[m]
            j = m
        else:
            break
    return d, v, hn


@njit(cache=True)
def sssp(indptr, nbrs, lens, alive, sources, bound, dist, seen, visit, stamp, hd, hv, out_nodes):
    """Multi-source bounded Dijkstra along one adjacency direction.

    Settled vertices (final distance <= bound, or all reachable if bound < 0)
    are written to out_nodes in nondecreasing distance order; their count is
    returned.  dist[v] is valid iff visit[v] == stamp.
    """
    hn = 0
    for i in range(sources.shape[0]):
        s = sources[i]
        if alive[s] == 0:
            continue
        if seen[s] != stamp or dist[s] > 0:
            seen[s] = stamp
            dist[s] = 0
            hn = _heap_push(hd, hv, hn, 0, s)
    count = 0
    while hn > 0:
        d, v, hn = _heap_pop(hd, hv, hn)
        if visit[v] == stamp:
            continue
        if dist[v] != d:
            continue
        visit[v] = stamp
        out_nodes[count] = v
        count += 1
        for k in range(indptr[v], indptr[v + 1]):
            u = nbrs[k]
            if alive[u] == 0 or visit[u] == stamp:
                continue
            nd = d + lens[k]
            if bound >= 0 and nd > bound:
                continue
            if seen[u] != stamp or nd < dist[u]:
                seen[u] = stamp
                dist[u] = nd
                hn = _heap_push(hd, hv, hn, nd, u)
    return count


@njit(cache=True)
def ball_stats_batch(dir_indptr, dir_nbrs, dir_lens, out_indptr, out_nbrs,
                     in_indptr, in_nbrs, alive, targets, radius, ecap,
                     dist, seen, visit, stamp, hd, hv,
                     vcounts, ecounts):
    """Per-target ball statistics at a fixed radius.

    For each target v, computes the number of vertices in its ball along the
    ``dir`` adjacency and the number of edges induced by the ball (both
    restricted to alive vertices).  Induced edges are counted incrementally:
    an edge contributes when its second endpoint settles.

    If ecap >= 0, exploration aborts once the induced-edge count exceeds
    ecap; the edge count is then reported as ecap + 1 and the vertex count
    is a partial value (only the "exceeds cap" verdict is meaningful).
    Returns the updated stamp value.
    """
    for t in range(targets.shape[0]):
        src = targets[t]
        stamp += 1
        vc = 0
        ec = 0
        if alive[src] == 0:
            vcounts[t] = 0
            ecounts[t] = 0
            continue
        hn = 0
        seen[src] = stamp
        dist[src] = 0
        hn = _heap_push(hd, hv, hn, 0, src)
        while hn > 0:
            d, v, hn = _heap_pop(hd, hv, hn)
            if visit[v] == stamp:
                continue
            if dist[v] != d:
                continue
            visit[v] = stamp
            vc += 1
            for k in range(out_indptr[v], out_indptr[v + 1]):
                u = out_nbrs[k]
                if alive[u] != 0 and visit[u] == stamp:
                    ec += 1
            for k in range(in_indptr[v], in_indptr[v + 1]):
                u = in_nbrs[k]
                if alive[u] != 0 and visit[u] == stamp:
                    ec += 1
            if ecap >= 0 and ec > ecap:
                ec = ecap + 1
                break
            for k in range(dir_indptr[v], dir_indptr[v + 1]):
                u = dir_nbrs[k]
                if alive[u] == 0 or visit[u] == stamp:
                    continue
                nd = d + dir_lens[k]
                if nd > radius:
                    continue
                if seen[u] != stamp or nd < dist[u]:
                    seen[u] = stamp
                    dist[u] = nd
                    hn = _heap_push(hd, hv, hn, nd, u)
        vcounts[t] = vc
        ecounts[t] = ec
    return stamp


@njit(cache=True)
def carve_ball(dir_indptr, dir_nbrs, dir_lens, dir_eids, alive, center, radius,
               dist, seen, visit, stamp, hd, hv,
               members, inside_eids, boundary_eids):
    """Carve the radius-bounded ball around center along ``dir`` adjacency.

    Fills ``members`` with alive ball vertices (distance order), the edge ids
    induced inside the ball and the boundary edge ids (dir-edges from a member
    to an alive non-member).  Returns (n_members, n_inside, n_boundary).
    """
    hn = 0
    nm = 0
    seen[center] = stamp
    dist[center] = 0
    hn = _heap_push(hd, hv, hn, 0, center)
    while hn > 0:
        d, v, hn = _heap_pop(hd, hv, hn)
        if visit[v] == stamp:
            continue
        if dist[v] != d:
            continue
        visit[v] = stamp
        members[nm] = v
        nm += 1
        for k in range(dir_indptr[v], dir_indptr[v + 1]):
            u = dir_nbrs[k]
            if alive[u] == 0 or visit[u] == stamp:
                continue
            nd = d + dir_lens[k]
            if nd > radius:
                continue
            if seen[u] != stamp or nd < dist[u]:
                seen[u] = stamp
                dist[u] = nd
                hn = _heap_push(hd, hv, hn, nd, u)
    ni = 0
    nb = 0
    for i in range(nm):
        v = members[i]
        for k in range(dir_indptr[v], dir_indptr[v + 1]):
            u = dir_nbrs[k]
            if alive[u] == 0:
                continue
            if visit[u] == stamp:
                inside_eids[ni] = dir_eids[k]
                ni += 1
            else:
                boundary_eids[nb] = dir_eids[k]
                nb += 1
    return nm, ni, nb


@njit(cache=True)
def collect_induced_eids(indptr, nbrs, eids, members, visit, stamp, out_eids):
    """Edge ids with both endpoints in members (members need not be alive)."""
    for i in range(members.shape[0]):
        visit[members[i]] = stamp
    cnt = 0
    for i in range(members.shape[0]):
        v = members[i]
        for k in range(indptr[v], indptr[v + 1]):
            if visit[nbrs[k]] == stamp:
                out_eids[cnt] = eids[k]
                cnt += 1
    return cnt


@njit(cache=True)
def count_alive_edges(tails, heads, alive):
    c = 0
    for k in range(tails.shape[0]):
        if alive[tails[k]] != 0 and alive[heads[k]] != 0:
            c += 1
    return c


@njit(cache=True)
def tarjan_scc(indptr, nbrs, eids, edge_ok, use_edge_ok, node_in, sub, comp,
               index, lowlink, onstack, stack, call_v, call_ei):
    """Iterative Tarjan over the subgraph induced by ``sub``.

    node_in[v] must be nonzero exactly for v in sub; comp[v] is set for those
    vertices (component ids in reverse topological completion order).
    index/lowlink/onstack must be sized n and are reset here for sub entries.
    Returns the number of components.
    """
    for i in range(sub.shape[0]):
        index[sub[i]] = -1
        onstack[sub[i]] = 0
    idx = 0
    ncomp = 0
    sp = 0
    for i in range(sub.shape[0]):
        root = sub[i]
        if index[root] != -1:
            continue
        csp = 0
        call_v[csp] = root
        call_ei[csp] = indptr[root]
        index[root] = idx
        lowlink[root] = idx
        idx += 1
        stack[sp] = root
        sp += 1
        onstack[root] = 1
        while csp >= 0:
            v = call_v[csp]
            k = call_ei[csp]
            advanced = False
            while k < indptr[v + 1]:
                u = nbrs[k]
                ok = node_in[u] != 0
                if ok and use_edge_ok != 0 and edge_ok[eids[k]] == 0:
                    ok = False
                k += 1
                if not ok:
                    continue
                if index[u] == -1:
                    call_ei[csp] = k
                    csp += 1
                    call_v[csp] = u
                    call_ei[csp] = indptr[u]
                    index[u] = idx
                    lowlink[u] = idx
                    idx += 1
                    stack[sp] = u
                    sp += 1
                    onstack[u] = 1
                    advanced = True
                    break
                elif onstack[u] != 0:
                    if index[u] < lowlink[v]:
                        lowlink[v] = index[u]
            if advanced:
                continue
            if lowlink[v] == index[v]:
                while True:
                    sp -= 1
                    w = stack[sp]
                    onstack[w] = 0
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            csp -= 1
            if csp >= 0:
                p = call_v[csp]
                if lowlink[v] < lowlink[p]:
                    lowlink[p] = lowlink[v]
    return ncomp


@njit(cache=True)
def eccentricity_bound(indptr, nbrs, lens, alive, subset, in_subset, bound,
                       dist, seen, visit, stamp, hd, hv, out_nodes):
    """Max over u in subset of max over v in subset of dist(u, v).

    Exploration from each source stops once all subset members are settled.
    If bound >= 0, paths longer than bound are pruned; an unsettled subset
    member then yields INF (meaning "greater than bound or unreachable").
    Returns (max_distance_or_INF, updated_stamp).
    """
    best = np.int64(0)
    want = subset.shape[0]
    for i in range(want):
        src = subset[i]
        stamp += 1
        hn = 0
        seen[src] = stamp
        dist[src] = 0
        hn = _heap_push(hd, hv, hn, 0, src)
        found = 0
        local = np.int64(0)
        while hn > 0:
            d, v, hn = _heap_pop(hd, hv, hn)
            if visit[v] == stamp:
                continue
            if dist[v] != d:
                continue
            visit[v] = stamp
            if in_subset[v] != 0:
                found += 1
                if d > local:
                    local = d
                if found == want:
                    break
            for k in range(indptr[v], indptr[v + 1]):
                u = nbrs[k]
                if alive[u] == 0 or visit[u] == stamp:
                    continue
                nd = d + lens[k]
                if bound >= 0 and nd > bound:
                    continue
                if seen[u] != stamp or nd < dist[u]:
                    seen[u] = stamp
                    dist[u] = nd
                    hn = _heap_push(hd, hv, hn, nd, u)
        if found < want:
            return INF, stamp
        if local > best:
            best = local
    return best, stamp
