"""Numba-compiled hot kernels: grid Dijkstra and Dinic max-flow.

Signatures mirror `_kernels_py` exactly; `backend` picks one module at
import.  Everything is plain int64 array code so the compiled and the
fallback paths produce bit-identical residuals and distances.
"""

import numpy as np
from numba import njit

NAME = "numba"

_INF = np.int64(1) << np.int64(62)


@njit(cache=True)
def dijkstra_grid(east, north, alive, src, dst):
    """Shortest-path weight from src to dst (flat indices) on a masked grid.

    east[iy, ix] weights the bond (ix,iy)-(ix+1,iy), north[iy, ix] the bond
    (ix,iy)-(ix,iy+1); only sites with alive true participate.  Returns -1
    if dst is unreachable.
    """
    H, W = alive.shape
    N = H * W
    dist = np.full(N, _INF, np.int64)
    cap = 8 * N + 16
    heap_d = np.empty(cap, np.int64)
    heap_v = np.empty(cap, np.int64)
    size = 0

    dist[src] = 0
    heap_d[0] = 0
    heap_v[0] = src
    size = 1

    while size > 0:
        d0 = heap_d[0]
        u = heap_v[0]
        size -= 1
        heap_d[0] = heap_d[size]
        heap_v[0] = heap_v[size]
        i = 0
        while True:  # sift down
            l = 2 * i + 1
            r = l + 1
            m = i
            if l < size and heap_d[l] < heap_d[m]:
                m = l
            if r < size and heap_d[r] < heap_d[m]:
                m = r
            if m == i:
                break
            heap_d[i], heap_d[m] = heap_d[m], heap_d[i]
            heap_v[i], heap_v[m] = heap_v[m], heap_v[i]
            i = m
        if d0 > dist[u]:
            continue
        if u == dst:
            return d0
        iy = u // W
        ix = u - iy * W
        for k in range(4):
            if k == 0:  # east
                if ix + 1 >= W or not alive[iy, ix + 1]:
                    continue
                v = u + 1
                w = east[iy, ix]
            elif k == 1:  # north
                if iy + 1 >= H or not alive[iy + 1, ix]:
                    continue
                v = u + W
                w = north[iy, ix]
            elif k == 2:  # west
                if ix == 0 or not alive[iy, ix - 1]:
                    continue
                v = u - 1
                w = east[iy, ix - 1]
            else:  # south
                if iy == 0 or not alive[iy - 1, ix]:
                    continue
                v = u - W
                w = north[iy - 1, ix]
            nd = d0 + w
            if nd < dist[v]:
                dist[v] = nd
                j = size
                heap_d[j] = nd
                heap_v[j] = v
                size += 1
                while j > 0:  # sift up
                    p = (j - 1) // 2
                    if heap_d[p] <= heap_d[j]:
                        break
                    heap_d[p], heap_d[j] = heap_d[j], heap_d[p]
                    heap_v[p], heap_v[j] = heap_v[j], heap_v[p]
                    j = p
    return np.int64(-1)


@njit(cache=True)
def dinic_maxflow(n_nodes, eu, ev, capf, capr, s, t):
    """Exact integer max flow (Dinic) on an explicit arc-pair list.

    Edge k becomes arc 2k (eu->ev, capacity capf[k]) and arc 2k+1 (ev->eu,
    capacity capr[k]); an undirected bond passes capf == capr.  Returns
    (value, residual array over arcs, source-side residual reachability).
    Adjacency order is the edge input order, so runs are reproducible.
    """
    m = eu.shape[0]
    M = 2 * m
    to = np.empty(M, np.int64)
    nxt = np.empty(M, np.int64)
    res = np.empty(M, np.int64)
    head = np.full(n_nodes, -1, np.int64)
    for k in range(m - 1, -1, -1):  # prepend in reverse: adjacency in edge order
        a = 2 * k + 1
        to[a] = eu[k]
        res[a] = capr[k]
        nxt[a] = head[ev[k]]
        head[ev[k]] = a
        a = 2 * k
        to[a] = ev[k]
        res[a] = capf[k]
        nxt[a] = head[eu[k]]
        head[eu[k]] = a

    level = np.empty(n_nodes, np.int64)
    itp = np.empty(n_nodes, np.int64)
    queue = np.empty(n_nodes, np.int64)
    path_arcs = np.empty(n_nodes + 1, np.int64)
    path_nodes = np.empty(n_nodes + 1, np.int64)
    total = np.int64(0)

    while True:
        for i in range(n_nodes):
            level[i] = -1
        level[s] = 0
        queue[0] = s
        qh, qt = 0, 1
        while qh < qt:
            u = queue[qh]
            qh += 1
            a = head[u]
            while a != -1:
                v = to[a]
                if res[a] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue[qt] = v
                    qt += 1
                a = nxt[a]
        if level[t] < 0:
            break

        for i in range(n_nodes):
            itp[i] = head[i]
        depth = 0
        u = s
        while True:
            if u == t:
                bn = _INF
                for d in range(depth):
                    if res[path_arcs[d]] < bn:
                        bn = res[path_arcs[d]]
                for d in range(depth):
                    a = path_arcs[d]
                    res[a] -= bn
                    res[a ^ 1] += bn
                total += bn
                nd = depth
                for d in range(depth):
                    if res[path_arcs[d]] == 0:
                        nd = d
                        break
                depth = nd
                u = path_nodes[depth] if depth > 0 else s
                continue
            a = itp[u]
            advanced = False
            while a != -1:
                v = to[a]
                if res[a] > 0 and level[v] == level[u] + 1:
                    advanced = True
                    break
                a = nxt[a]
                itp[u] = a
            if advanced:
                path_arcs[depth] = a
                path_nodes[depth] = u
                depth += 1
                u = to[a]
            else:
                level[u] = -1  # dead this phase
                if u == s:
                    break
                depth -= 1
                u = path_nodes[depth]
                itp[u] = nxt[itp[u]]

    reach = np.zeros(n_nodes, np.uint8)
    reach[s] = 1
    queue[0] = s
    qh, qt = 0, 1
    while qh < qt:
        u = queue[qh]
        qh += 1
        a = head[u]
        while a != -1:
            v = to[a]
            if res[a] > 0 and reach[v] == 0:
                reach[v] = 1
                queue[qt] = v
                qt += 1
            a = nxt[a]
    return total, res, reach
