"""First-passage distances on the primal and dual lattices, and empirical
estimation of the time constant.

A dual bond weighs exactly what its primal partner does, so dual path
lengths are the primal capacities read through the involution.  The time
constant has no closed form for nontrivial laws; it is always estimated
from point-to-point distances d(0, n*v)/n, which are biased upward by
subadditivity with the bias shrinking in n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, NamedTuple, Sequence, Tuple

import numpy as np

from . import backend
from .capacity import MICRO_SCALE, CapacityField, DistributionSpec, derive_seed

MAX_SEGMENT_EXTENT = 2048  # desk-scale guard on n * |v| for mu estimation


class Unreachable(Exception):
    """No path between the requested endpoints inside the allowed region."""


class MissingDirection(Exception):
    """A direction is not tabulated, even after rotation/sign symmetry."""


class Box(NamedTuple):
    """Inclusive coordinate box of (dual-)lattice vertices."""

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def height(self) -> int:
        return self.y1 - self.y0 + 1

    def contains(self, p) -> bool:
        return self.x0 <= p[0] <= self.x1 and self.y0 <= p[1] <= self.y1


@dataclass(frozen=True)
class PassageLattice:
    """A capacity field read as edge weights, on the primal or dual graph."""

    which: str  # 'primal' | 'dual'
    field: CapacityField

    def __post_init__(self):
        if self.which not in ("primal", "dual"):
            raise ValueError("which must be 'primal' or 'dual'")

    def weight_arrays(self, box: Box) -> Tuple[np.ndarray, np.ndarray]:
        """(east, north) weight grids over the box, in micro-units.

        east[iy, ix] weighs the bond (box.x0+ix, box.y0+iy) -> east neighbor,
        north likewise.  On the dual graph the weight of a dual bond is the
        capacity of the primal bond it crosses.
        """
        w, h = box.width, box.height
        f = self.field
        if self.which == "primal":
            east = f.bond_micro_grid(box.x0, box.y0, w - 1, h, 0)
            north = f.bond_micro_grid(box.x0, box.y0, w, h - 1, 1)
        else:
            # dual east bond (i,j)-(i+1,j) crosses the primal vertical bond at (i+1, j);
            # dual north bond (i,j)-(i,j+1) crosses the primal horizontal bond at (i, j+1)
            east = f.bond_micro_grid(box.x0 + 1, box.y0, w - 1, h, 1)
            north = f.bond_micro_grid(box.x0, box.y0 + 1, w, h - 1, 0)
        return east, north


def distance(lat: PassageLattice, a, b, box: Box) -> int:
    """Exact shortest-path weight from a to b using only vertices in box.

    The result never increases when the box grows, and equals the free
    distance once the box is large enough.
    """
    if not (box.contains(a) and box.contains(b)):
        raise ValueError("endpoints must lie inside the box")
    east, north = lat.weight_arrays(box)
    alive = np.ones((box.height, box.width), dtype=bool)
    src = (a[1] - box.y0) * box.width + (a[0] - box.x0)
    dst = (b[1] - box.y0) * box.width + (b[0] - box.x0)
    d = backend.dijkstra_grid(east, north, alive, src, dst)
    if d < 0:
        raise Unreachable(f"no path from {a} to {b} inside {box}")
    return int(d)


@dataclass(frozen=True)
class MuEstimate:
    """Empirical time constant along one primitive direction.

    mean_micro is micro-units per copy of the direction vector; it is kept
    as an exact rational so degenerate laws stay exact downstream.
    """

    direction: Tuple[int, int]
    n_used: int
    replicates: int
    mean_micro: Fraction
    stderr_micro: float


def rot90(v: Tuple[int, int]) -> Tuple[int, int]:
    return (-v[1], v[0])


def direction_orbit(v: Tuple[int, int]):
    """The four images of v under 90-degree rotation (includes -v)."""
    r1 = rot90(v)
    r2 = rot90(r1)
    r3 = rot90(r2)
    return (tuple(v), r1, r2, r3)


def canonical_direction(w: Tuple[int, int]) -> Tuple[int, int]:
    """Primitive orbit representative with x > 0, y >= 0."""
    wx, wy = int(w[0]), int(w[1])
    if wx == 0 and wy == 0:
        raise ValueError("zero vector has no direction")
    g = gcd(abs(wx), abs(wy))
    p = (wx // g, wy // g)
    for cand in direction_orbit(p):
        if cand[0] > 0 and cand[1] >= 0:
            return cand
    raise AssertionError("unreachable: one rotation lands in the canonical quadrant")


@dataclass(frozen=True)
class MuTable:
    """Per-direction estimates of the time constant, keyed by primitive
    canonical direction."""

    entries: Dict[Tuple[int, int], MuEstimate]
    scale: int = MICRO_SCALE

    def __post_init__(self):
        fixed = {}
        for key, est in self.entries.items():
            fixed[canonical_direction(key)] = est
        object.__setattr__(self, "entries", fixed)

    @property
    def mu_min(self) -> Fraction:
        """min over tabulated directions of mu(v)/|v|_1."""
        return min(e.mean_micro / _l1(v) for v, e in self.entries.items())

    @property
    def mu_max(self) -> Fraction:
        return max(e.mean_micro / _l1(v) for v, e in self.entries.items())

    def to_csv(self) -> str:
        lines = ["direction_x,direction_y,n,reps,mean_micro,stderr_micro"]
        for v in sorted(self.entries):
            e = self.entries[v]
            lines.append(
                f"{v[0]},{v[1]},{e.n_used},{e.replicates},"
                f"{_frac_str(e.mean_micro)},{e.stderr_micro!r}"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, scale: int = MICRO_SCALE) -> "MuTable":
        rows = [r for r in text.strip().splitlines() if r and not r.startswith("#")]
        header, body = rows[0], rows[1:]
        if header.split(",") != ["direction_x", "direction_y", "n", "reps", "mean_micro", "stderr_micro"]:
            raise ValueError("unexpected mu table header")
        entries = {}
        for row in body:
            sx, sy, sn, sr, sm, se = row.split(",")
            v = (int(sx), int(sy))
            entries[v] = MuEstimate(v, int(sn), int(sr), Fraction(sm), float(se))
        return cls(entries, scale=scale)


def _l1(v) -> int:
    return abs(v[0]) + abs(v[1])


def _frac_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def mu_eval(table: MuTable, w) -> Fraction:
    """Evaluate the tabulated norm at an integer vector, micro-units.

    Positively homogeneous by construction; missing directions are filled
    through the 90-degree rotation and sign symmetries of the lattice law.
    """
    wx, wy = int(w[0]), int(w[1])
    if wx == 0 and wy == 0:
        return Fraction(0)
    g = gcd(abs(wx), abs(wy))
    key = canonical_direction((wx, wy))
    est = table.entries.get(key)
    if est is None:
        raise MissingDirection(f"direction {(wx, wy)} (canonical {key}) not tabulated")
    return g * est.mean_micro


def segment_box(v: Tuple[int, int], n: int) -> Box:
    """Bounding box of the segment 0 -> n*v, inflated by 50 percent of its
    larger extent on every side."""
    dx, dy = n * v[0], n * v[1]
    pad = (max(abs(dx), abs(dy), 1) + 1) // 2
    return Box(min(0, dx) - pad, min(0, dy) - pad, max(0, dx) + pad, max(0, dy) + pad)


def estimate_mu(
    spec: DistributionSpec,
    v: Tuple[int, int],
    n: int = 64,
    reps: int = 30,
    seed: int = 0,
    scale: int = MICRO_SCALE,
) -> MuEstimate:
    """Estimate the time constant along primitive direction v.

    Each replicate draws an independent field (seed chained from (seed, r))
    and measures the restricted distance 0 -> n*v inside `segment_box`.
    """
    vx, vy = int(v[0]), int(v[1])
    if (vx, vy) == (0, 0) or gcd(abs(vx), abs(vy)) != 1:
        raise ValueError("direction must be a nonzero primitive integer vector")
    if n < 4:
        raise ValueError("n must be >= 4")
    if reps < 2:
        raise ValueError("reps must be >= 2")
    if n * max(abs(vx), abs(vy)) > MAX_SEGMENT_EXTENT:
        raise ValueError(
            f"segment extent {n * max(abs(vx), abs(vy))} exceeds the desk-scale "
            f"guard {MAX_SEGMENT_EXTENT}; use a smaller n or a coarser direction"
        )
    box = segment_box((vx, vy), n)
    samples = []
    for r in range(1, reps + 1):
        field = CapacityField(spec, derive_seed(seed, [r]), scale)
        lat = PassageLattice("primal", field)
        samples.append(distance(lat, (0, 0), (n * vx, n * vy), box))
    mean = Fraction(sum(samples), reps * n)
    fm = float(mean)
    var = sum((s / n - fm) ** 2 for s in samples) / (reps - 1)
    return MuEstimate(
        direction=(vx, vy),
        n_used=n,
        replicates=reps,
        mean_micro=mean,
        stderr_micro=math.sqrt(var / reps),
    )


def estimate_mu_table(
    spec: DistributionSpec,
    directions: Sequence[Tuple[int, int]],
    n: int = 64,
    reps: int = 30,
    seed: int = 0,
    scale: int = MICRO_SCALE,
) -> MuTable:
    """Estimate one entry per distinct direction orbit, seeds chained from
    (seed, orbit index)."""
    canon = sorted({canonical_direction(v) for v in directions})
    entries = {}
    for idx, v in enumerate(canon):
        entries[v] = estimate_mu(spec, v, n=n, reps=reps, seed=derive_seed(seed, [idx]), scale=scale)
    return MuTable(entries, scale=scale)


def cylinder_crossing_time(lat: PassageLattice, z, xhat, R: float, h: float) -> int:
    """Minimal path weight across the cylinder around z + [0,h]*xhat.

    Uses only edges with both endpoints at transverse distance <= R and
    longitudinal projection in [0, h].  Endpoints are the integer points of
    the cylinder closest (Euclidean, then lexicographic) to the two ends.
    Raises Unreachable when the discrete cylinder is disconnected, which can
    happen for small R; that outcome is reported, never patched.
    """
    if h < 1 or R < 1:
        raise ValueError("need h >= 1 and R >= 1")
    zx, zy = float(z[0]), float(z[1])
    hx, hy = float(xhat[0]), float(xhat[1])
    norm = math.hypot(hx, hy)
    if norm == 0:
        raise ValueError("xhat must be a nonzero direction")
    hx, hy = hx / norm, hy / norm

    ex0, ey0 = zx, zy
    ex1, ey1 = zx + h * hx, zy + h * hy
    margin = R + 1
    box = Box(
        math.floor(min(ex0, ex1) - margin),
        math.floor(min(ey0, ey1) - margin),
        math.ceil(max(ex0, ex1) + margin),
        math.ceil(max(ey0, ey1) + margin),
    )
    xs = np.arange(box.x0, box.x1 + 1, dtype=np.float64)
    ys = np.arange(box.y0, box.y1 + 1, dtype=np.float64)
    px, py = np.meshgrid(xs, ys)
    lon = (px - zx) * hx + (py - zy) * hy
    trans = np.hypot((px - zx) - lon * hx, (py - zy) - lon * hy)
    member = (lon >= 0) & (lon <= h) & (trans <= R)
    if not member.any():
        raise Unreachable("the discrete cylinder contains no integer point")

    def closest(tx, ty):
        d2 = (px - tx) ** 2 + (py - ty) ** 2
        d2 = np.where(member, d2, np.inf)
        best = d2.min()
        iy, ix = np.nonzero(d2 == best)
        order = np.lexsort((ys[iy], xs[ix]))  # smallest x, then y
        return int(iy[order[0]]) * box.width + int(ix[order[0]])

    s0 = closest(ex0, ey0)
    sf = closest(ex1, ey1)
    east, north = lat.weight_arrays(box)
    d = backend.dijkstra_grid(east, north, member, s0, sf)
    if d < 0:
        raise Unreachable("discrete cylinder is disconnected between its ends")
    return int(d)
