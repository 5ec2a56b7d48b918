#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure NumPy fallback.

Times the two hot kernels on the workloads that dominate experiment
runtime: point-to-point Dijkstra on an exponential-weight grid, and a
truncated max-flow solve from a block source to the box boundary.  Both
backends are imported directly, so no env fiddling is needed; run as

    python3 benchmarks/bench_backends.py
"""

import time

import numpy as np

from latticeflow import _kernels_nb as knb
from latticeflow import _kernels_py as kpy
from latticeflow.capacity import CapacityField, DistributionSpec


def _time(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_dijkstra(side=257):
    field = CapacityField(DistributionSpec.exponential(1), 7)
    east = field.bond_micro_grid(0, 0, side - 1, side, 0)
    north = field.bond_micro_grid(0, 0, side, side - 1, 1)
    alive = np.ones((side, side), dtype=bool)
    src, dst = 0, side * side - 1
    knb.dijkstra_grid(east, north, alive, src, dst)  # JIT warmup
    t_nb, d_nb = _time(knb.dijkstra_grid, east, north, alive, src, dst)
    t_py, d_py = _time(kpy.dijkstra_grid, east, north, alive, src, dst, repeat=1)
    assert d_nb == d_py
    return f"dijkstra {side}x{side}", t_nb, t_py


def _grid_flow_instance(n):
    """Super-source block to box-boundary super-sink on the l1 ball V_n."""
    field = CapacityField(DistributionSpec.exponential(1), 11)
    S = 2 * n + 1
    absc = np.abs(np.arange(-n, n + 1, dtype=np.int64))
    l1 = np.add.outer(absc, absc)
    alive = l1 <= n
    ids = np.arange(S * S, dtype=np.int64).reshape(S, S)
    east = field.bond_micro_grid(-n, -n, S - 1, S, 0)
    north = field.bond_micro_grid(-n, -n, S, S - 1, 1)
    ve = alive[:, :-1] & alive[:, 1:]
    vn = alive[:-1, :] & alive[1:, :]
    eu = np.concatenate([ids[:, :-1][ve], ids[:-1, :][vn]])
    ev = np.concatenate([ids[:, 1:][ve], ids[1:, :][vn]])
    caps = np.concatenate([east[ve], north[vn]])
    amask = l1 <= 2
    a_ids = ids[amask]
    b_ids = ids[l1 == n]
    inf_cap = int(caps.sum()) + 1
    s, t = S * S, S * S + 1
    eu = np.concatenate([eu, np.full(len(a_ids), s, np.int64), b_ids])
    ev = np.concatenate([ev, a_ids, np.full(len(b_ids), t, np.int64)])
    capf = np.concatenate([caps, np.full(len(a_ids) + len(b_ids), inf_cap, np.int64)])
    capr = np.concatenate([caps, np.zeros(len(a_ids) + len(b_ids), np.int64)])
    return S * S + 2, eu, ev, capf, capr, s, t


def bench_dinic(n=40):
    args = _grid_flow_instance(n)
    knb.dinic_maxflow(*args)  # JIT warmup
    t_nb, (v_nb, _, _) = _time(knb.dinic_maxflow, *args)
    t_py, (v_py, _, _) = _time(kpy.dinic_maxflow, *args, repeat=1)
    assert v_nb == v_py
    return f"dinic maxflow V_{n}", t_nb, t_py


def main():
    rows = [bench_dijkstra(), bench_dinic()]
    print(f"{'workload':<24} {'numba':>10} {'numpy':>10} {'speedup':>9}")
    for name, t_nb, t_py in rows:
        print(f"{name:<24} {t_nb * 1e3:>8.1f}ms {t_py * 1e3:>8.1f}ms {t_py / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
