"""Kernel backend selection.

The env var LATTICEFLOW_BACKEND chooses the hot-kernel implementation:

  auto   (default) numba if importable, else the pure NumPy fallback
  numba  require the compiled kernels
  numpy  force the fallback (useful for debugging and benchmarking)

Both backends are value-identical; see benchmarks/bench_backends.py for a
speed comparison.
"""

import os

_choice = os.environ.get("LATTICEFLOW_BACKEND", "auto").strip().lower()

if _choice == "numpy":
    from . import _kernels_py as _impl
elif _choice == "numba":
    from . import _kernels_nb as _impl
elif _choice == "auto":
    try:
        from . import _kernels_nb as _impl
    except ImportError:  # pragma: no cover - exercised only without numba
        from . import _kernels_py as _impl
else:
    raise RuntimeError(f"LATTICEFLOW_BACKEND={_choice!r} (expected auto, numba or numpy)")

BACKEND = _impl.NAME
dijkstra_grid = _impl.dijkstra_grid
dinic_maxflow = _impl.dinic_maxflow
