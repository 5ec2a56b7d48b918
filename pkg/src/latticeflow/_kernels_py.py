"""Pure NumPy/Python fallback for the hot kernels.

Same contracts and same deterministic choices as `_kernels_nb`, so both
backends return identical residuals, distances and reachability sets;
only the speed differs.  Selected with LATTICEFLOW_BACKEND=numpy.
"""

import heapq
from collections import deque

import numpy as np

NAME = "numpy"

_INF = 1 << 62


def dijkstra_grid(east, north, alive, src, dst):
    """See `_kernels_nb.dijkstra_grid`."""
    H, W = alive.shape
    dist = {int(src): 0}
    heap = [(0, int(src))]
    dst = int(dst)
    while heap:
        d0, u = heapq.heappop(heap)
        if d0 > dist.get(u, _INF):
            continue
        if u == dst:
            return d0
        iy, ix = divmod(u, W)
        steps = []
        if ix + 1 < W and alive[iy, ix + 1]:
            steps.append((u + 1, int(east[iy, ix])))
        if iy + 1 < H and alive[iy + 1, ix]:
            steps.append((u + W, int(north[iy, ix])))
        if ix > 0 and alive[iy, ix - 1]:
            steps.append((u - 1, int(east[iy, ix - 1])))
        if iy > 0 and alive[iy - 1, ix]:
            steps.append((u - W, int(north[iy - 1, ix])))
        for v, w in steps:
            nd = d0 + w
            if nd < dist.get(v, _INF):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return -1


def dinic_maxflow(n_nodes, eu, ev, capf, capr, s, t):
    """See `_kernels_nb.dinic_maxflow`."""
    m = len(eu)
    to = np.empty(2 * m, np.int64)
    nxt = np.empty(2 * m, np.int64)
    res = np.empty(2 * m, np.int64)
    head = np.full(n_nodes, -1, np.int64)
    for k in range(m - 1, -1, -1):
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

    s, t = int(s), int(t)
    level = np.empty(n_nodes, np.int64)
    itp = np.empty(n_nodes, np.int64)
    path_arcs = [0] * (n_nodes + 1)
    path_nodes = [0] * (n_nodes + 1)
    total = 0

    while True:
        level.fill(-1)
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            a = head[u]
            while a != -1:
                v = to[a]
                if res[a] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    q.append(v)
                a = nxt[a]
        if level[t] < 0:
            break

        itp[:] = head
        depth = 0
        u = s
        while True:
            if u == t:
                bn = min(int(res[path_arcs[d]]) for d in range(depth))
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
                path_arcs[depth] = int(a)
                path_nodes[depth] = u
                depth += 1
                u = int(to[a])
            else:
                level[u] = -1
                if u == s:
                    break
                depth -= 1
                u = path_nodes[depth]
                itp[u] = nxt[itp[u]]

    reach = np.zeros(n_nodes, np.uint8)
    reach[s] = 1
    q = deque([s])
    while q:
        u = q.popleft()
        a = head[u]
        while a != -1:
            v = to[a]
            if res[a] > 0 and reach[v] == 0:
                reach[v] = 1
                q.append(int(v))
            a = nxt[a]
    return np.int64(total), res, reach
