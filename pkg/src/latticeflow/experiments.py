"""Monte Carlo harness: scaled min-cut convergence, deviation tails and
disjoint-path growth, all pure functions of their configuration.

Seed discipline: instance fields are seeded by chaining (master, [n, r]);
the norm-estimation pass chains (master, [0]) and further per direction
and replicate, so the two streams never share randomness (the limit ratio
compares two independently estimated objects).  Wall-clock timings are
carried on the records for diagnostics but excluded from equality, since
every data output must be a pure function of the configuration.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import permutations
from typing import List, Optional, Sequence, Tuple

from .capacity import (
    MICRO_SCALE,
    CapacityField,
    DistributionSpec,
    derive_seed,
    validate_for_theorems,
)
from .cutflow import MengerResult, menger_disjoint_paths, mincut_infinity
from .fpp import MuTable, estimate_mu_table
from .geometry import ConvexPolygon, contains_origin_interior, i_functional
from .lattice import SiteSet, sites_in_scaled_polygon

MU_STREAM_LABEL = 0  # leading label of the norm-estimation seed stream


@dataclass(frozen=True)
class RunConfig:
    """Everything an experiment depends on; records are pure in this."""

    spec: DistributionSpec
    polygon: ConvexPolygon
    n_grid: Tuple[int, ...]
    reps: int
    master_seed: int
    epsilon: Optional[Fraction] = None  # tail experiments
    p_open: Optional[Fraction] = None  # percolation experiments
    scale: int = MICRO_SCALE
    nmax_factor: int = 512
    mu_n: int = 64
    mu_reps: int = 30

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if any(b <= a for a, b in zip(grid, grid[1:])) or not grid:
            raise ValueError("n_grid must be nonempty and strictly increasing")
        if grid[0] < 1:
            raise ValueError("n_grid entries must be >= 1")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.epsilon is not None:
            eps = Fraction(self.epsilon)
            object.__setattr__(self, "epsilon", eps)
            if not 0 < eps < 1:
                raise ValueError("epsilon must lie in (0, 1)")
        if self.p_open is not None:
            object.__setattr__(self, "p_open", Fraction(self.p_open))


@dataclass
class ConvergenceRecord:
    n: int
    replicate: int
    mincut_micro: int
    i_hat_micro: Fraction
    ratio: Fraction
    stabilized: bool
    wall_time: float = dc_field(compare=False, default=0.0)


@dataclass
class DisjointRecord:
    n: int
    replicate: int
    count: int
    i_hat: Fraction  # bond units (unit capacities)
    ratio: Fraction
    stabilized: bool
    wall_time: float = dc_field(compare=False, default=0.0)


@dataclass
class TailSummary:
    n: int
    reps: int
    outside: int
    frequency: float
    wilson_lo: float
    wilson_hi: float


def instance_seed(master: int, n: int, r: int) -> int:
    """Field seed of replicate r at scale n (the documented stream)."""
    return derive_seed(master, [n, r])


def _check_preconditions(cfg: RunConfig) -> None:
    if not contains_origin_interior(cfg.polygon):
        raise ValueError("the polygon must contain the origin in its interior")
    report = validate_for_theorems(cfg.spec)
    if not report.zero_mass_ok:
        warnings.warn(
            f"law {cfg.spec} has mass >= 1/2 at zero; the limit theorems do not apply",
            stacklevel=3,
        )


def estimate_polygon_table(cfg: RunConfig, scale: Optional[int] = None) -> MuTable:
    """Norm table for the polygon's side directions, on its own seed stream."""
    return estimate_mu_table(
        cfg.spec,
        cfg.polygon.side_directions(),
        n=cfg.mu_n,
        reps=cfg.mu_reps,
        seed=derive_seed(cfg.master_seed, [MU_STREAM_LABEL]),
        scale=cfg.scale if scale is None else scale,
    )


def run_convergence(cfg: RunConfig) -> List[ConvergenceRecord]:
    """Scaled min-cut against the estimated boundary functional.

    One record per (n, replicate), ordered by n then replicate; failed
    (non-stabilized) records are kept and flagged, never dropped.
    """
    _check_preconditions(cfg)
    table = estimate_polygon_table(cfg)
    i_hat = i_functional(cfg.polygon, table).value_micro
    if i_hat <= 0:
        raise ValueError("estimated boundary functional is not positive")
    records = []
    for n in cfg.n_grid:
        source = sites_in_scaled_polygon(cfg.polygon, n)
        for r in range(1, cfg.reps + 1):
            field = CapacityField(cfg.spec, instance_seed(cfg.master_seed, n, r), cfg.scale)
            t0 = time.perf_counter()
            res = mincut_infinity(field, source, nmax_factor=cfg.nmax_factor)
            dt = time.perf_counter() - t0
            records.append(
                ConvergenceRecord(
                    n=n,
                    replicate=r,
                    mincut_micro=res.value_micro,
                    i_hat_micro=i_hat,
                    ratio=Fraction(res.value_micro) / (n * i_hat),
                    stabilized=res.stabilized,
                    wall_time=dt,
                )
            )
    return records


def tail_frequencies(
    records: Sequence[ConvergenceRecord], epsilon: Fraction
) -> List[TailSummary]:
    """Per-n frequency of ratios outside (1-eps, 1+eps), Wilson 95% bounds."""
    by_n = {}
    for rec in records:
        by_n.setdefault(rec.n, []).append(rec)
    out = []
    for n in sorted(by_n):
        group = by_n[n]
        outside = sum(
            1 for rec in group if not (1 - epsilon < rec.ratio < 1 + epsilon)
        )
        lo, hi = wilson_interval(outside, len(group))
        out.append(
            TailSummary(
                n=n,
                reps=len(group),
                outside=outside,
                frequency=outside / len(group),
                wilson_lo=lo,
                wilson_hi=hi,
            )
        )
    return out


def run_tail(cfg: RunConfig) -> Tuple[List[TailSummary], List[ConvergenceRecord]]:
    """Deviation-tail experiment: convergence records plus per-n summaries."""
    if cfg.epsilon is None:
        raise ValueError("tail experiments need epsilon")
    records = run_convergence(cfg)
    return tail_frequencies(records, cfg.epsilon), records


def run_disjoint(cfg: RunConfig) -> List[DisjointRecord]:
    """Edge-disjoint open path counts dis(nA), with the same doubling
    stabilization as the min-cut limit; unit capacities throughout."""
    if cfg.p_open is None:
        raise ValueError("disjoint experiments need p_open")
    if not Fraction(1, 2) < cfg.p_open <= 1:
        warnings.warn(
            f"p_open={cfg.p_open} is outside the supercritical regime (1/2, 1]",
            stacklevel=2,
        )
    bern_cfg = RunConfig(
        spec=DistributionSpec.bernoulli(cfg.p_open),
        polygon=cfg.polygon,
        n_grid=cfg.n_grid,
        reps=cfg.reps,
        master_seed=cfg.master_seed,
        scale=1,  # bond units: Bernoulli samples are exactly 0/1
        nmax_factor=cfg.nmax_factor,
        mu_n=cfg.mu_n,
        mu_reps=cfg.mu_reps,
    )
    _check_preconditions(bern_cfg)
    table = estimate_polygon_table(bern_cfg)
    i_hat = i_functional(cfg.polygon, table).value_micro
    if i_hat <= 0:
        raise ValueError("estimated boundary functional is not positive")
    records = []
    for n in cfg.n_grid:
        source = sites_in_scaled_polygon(cfg.polygon, n)
        for r in range(1, cfg.reps + 1):
            seed = instance_seed(cfg.master_seed, n, r)
            t0 = time.perf_counter()
            result = _disjoint_stabilized(cfg.p_open, source, seed, cfg.nmax_factor)
            dt = time.perf_counter() - t0
            records.append(
                DisjointRecord(
                    n=n,
                    replicate=r,
                    count=result.count,
                    i_hat=i_hat,
                    ratio=Fraction(result.count) / (n * i_hat),
                    stabilized=result.maxflow.stabilized,
                    wall_time=dt,
                )
            )
    return records


def _disjoint_stabilized(p_open, source: SiteSet, seed: int, nmax_factor: int) -> MengerResult:
    """dis(A) by box doubling: counts are nonincreasing in the box radius,
    equality plus a strictly interior cut certifies the limit."""
    n = source.radius + 8
    n_max = nmax_factor * max(source.radius, 1)
    prev: Optional[MengerResult] = None
    while True:
        cur = menger_disjoint_paths(p_open, source, n, seed)
        if (
            prev is not None
            and cur.count == prev.count
            and (
                cur.count == 0
                or cur.maxflow.mincut.max_endpoint_norm() < prev.maxflow.box_used
            )
        ):
            cur.maxflow.stabilized = True
            return cur
        if 2 * n > n_max:
            return cur
        prev = cur
        n *= 2


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> Tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion."""
    if n == 0:
        return (0.0, 1.0)
    p = k / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def mann_kendall_S(xs: Sequence[float]) -> int:
    s = 0
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            if xs[j] > xs[i]:
                s += 1
            elif xs[j] < xs[i]:
                s -= 1
    return s


def mann_kendall_p_increasing(xs: Sequence[float]) -> float:
    """Exact one-sided p-value P(S >= S_obs) under random ordering of the
    observed multiset (handles ties); sequences here are short, so the
    permutation null is enumerated outright."""
    if len(xs) > 8:
        raise ValueError("exact permutation test limited to 8 points")
    s_obs = mann_kendall_S(xs)
    perms = list(permutations(xs))
    ge = sum(1 for p in perms if mann_kendall_S(p) >= s_obs)
    return ge / len(perms)
