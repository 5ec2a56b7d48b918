"""Square lattice geometry: primal sites/bonds, the shifted dual, and the
bond involution.

Dual sites are stored as integer pairs (i, j) standing for the plane point
(i + 1/2, j + 1/2), so every predicate in this module is exact integer
arithmetic.  The involution pairing each primal bond with the unique dual
bond that crosses it is what turns bond cutsets into closed dual paths.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import gcd
from typing import Iterable, NamedTuple, Tuple, TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .geometry import ConvexPolygon


class EmptyRegion(Exception):
    """A scaled region contains no lattice point."""


class Site(NamedTuple):
    x: int
    y: int


class DualSite(NamedTuple):
    """The dual-lattice point (i + 1/2, j + 1/2), stored as (i, j)."""

    i: int
    j: int

    @property
    def point(self) -> Tuple[float, float]:
        return (self.i + 0.5, self.j + 0.5)


class Bond(NamedTuple):
    """Unordered lattice bond, endpoints in canonical (lexicographic) order."""

    a: Site
    b: Site


class DualBond(NamedTuple):
    a: DualSite
    b: DualSite


def bond(a, b) -> Bond:
    """Canonical bond between two l1-adjacent sites."""
    a = Site(int(a[0]), int(a[1]))
    b = Site(int(b[0]), int(b[1]))
    if abs(a.x - b.x) + abs(a.y - b.y) != 1:
        raise ValueError(f"sites {a} and {b} are not adjacent")
    return Bond(a, b) if a <= b else Bond(b, a)


def dual_bond(a, b) -> DualBond:
    a = DualSite(int(a[0]), int(a[1]))
    b = DualSite(int(b[0]), int(b[1]))
    if abs(a.i - b.i) + abs(a.j - b.j) != 1:
        raise ValueError(f"dual sites {a} and {b} are not adjacent")
    return DualBond(a, b) if a <= b else DualBond(b, a)


def neighbors(s: Site) -> list:
    """The four l1-neighbors in fixed order E, N, W, S."""
    x, y = s
    return [Site(x + 1, y), Site(x, y + 1), Site(x - 1, y), Site(x, y - 1)]


def bond_key(e: Bond) -> Tuple[int, int, int]:
    """(x, y, orientation) of the lower endpoint; orientation 0 = east, 1 = north.

    Every bond has exactly one such encoding, which is what the capacity
    hash is keyed on.
    """
    (ax, ay), (bx, by) = e
    if ax + 1 == bx and ay == by:
        return (ax, ay, 0)
    if ax == bx and ay + 1 == by:
        return (ax, ay, 1)
    raise ValueError(f"bond {e} is not canonical")


def s_of_bond(e: Bond) -> DualBond:
    """The unique dual bond crossing e (the two pairs of endpoints form a
    unit square)."""
    x, y, o = bond_key(e)
    if o == 0:  # horizontal bond -> vertical dual bond
        return DualBond(DualSite(x, y - 1), DualSite(x, y))
    return DualBond(DualSite(x - 1, y), DualSite(x, y))  # vertical -> horizontal


def s_of_dual_bond(d: DualBond) -> Bond:
    """Inverse of `s_of_bond` (the map is an involution)."""
    (ai, aj), (bi, bj) = d
    if ai == bi and aj + 1 == bj:  # vertical dual bond -> horizontal bond
        return Bond(Site(ai, bj), Site(ai + 1, bj))
    if ai + 1 == bi and aj == bj:  # horizontal dual bond -> vertical bond
        return Bond(Site(bi, aj), Site(bi, aj + 1))
    raise ValueError(f"dual bond {d} is not canonical")


def int_of_point(z) -> DualSite:
    """The unique dual site x with z in x + [-1/2, 1/2)^2.

    Coordinates exactly on the +1/2 face round up (half-open convention).
    """
    return DualSite(math.floor(z[0]), math.floor(z[1]))


class SiteSet:
    """Finite nonempty set of sites, the source region of a flow problem."""

    __slots__ = ("sites", "_radius", "_bbox")

    def __init__(self, sites: Iterable):
        self.sites = frozenset(Site(int(p[0]), int(p[1])) for p in sites)
        if not self.sites:
            raise ValueError("a SiteSet must be nonempty")
        self._radius = max(abs(s.x) + abs(s.y) for s in self.sites)
        xs = [s.x for s in self.sites]
        ys = [s.y for s in self.sites]
        self._bbox = (min(xs), min(ys), max(xs), max(ys))

    @property
    def radius(self) -> int:
        """Largest l1 norm over the sites."""
        return self._radius

    @property
    def bbox(self) -> Tuple[int, int, int, int]:
        return self._bbox

    def __iter__(self):
        return iter(sorted(self.sites))

    def __len__(self):
        return len(self.sites)

    def __contains__(self, s):
        return Site(int(s[0]), int(s[1])) in self.sites

    def __eq__(self, other):
        return isinstance(other, SiteSet) and self.sites == other.sites

    def __hash__(self):
        return hash(self.sites)

    def __repr__(self):
        return f"SiteSet({len(self.sites)} sites, radius {self._radius})"


def sites_in_scaled_polygon(polygon: "ConvexPolygon", n: int) -> SiteSet:
    """All integer points inside or on the boundary of n * polygon.

    Half-plane tests run in exact integer arithmetic (polygon vertices are
    rational); boundary points count as inside.
    """
    if n < 1:
        raise ValueError("scale n must be >= 1")
    verts = polygon.vertices
    den = 1
    for vx, vy in verts:
        den = den * vx.denominator // gcd(den, vx.denominator)
        den = den * vy.denominator // gcd(den, vy.denominator)
    # vertex coordinates of n*polygon, multiplied by den: exact integers
    ax = [int(vx * n * den) for vx, vy in verts]
    ay = [int(vy * n * den) for vx, vy in verts]

    xmin = math.ceil(min(Fraction(v, den) for v in ax))
    xmax = math.floor(max(Fraction(v, den) for v in ax))
    ymin = math.ceil(min(Fraction(v, den) for v in ay))
    ymax = math.floor(max(Fraction(v, den) for v in ay))
    if xmin > xmax or ymin > ymax:
        raise EmptyRegion(f"no lattice point in {n} * polygon")

    k = len(verts)
    coord_bound = max(
        max(abs(v) for v in ax + ay), den * max(abs(xmin), abs(xmax), abs(ymin), abs(ymax), 1)
    )
    if 8 * coord_bound * coord_bound < 2**62:
        xs = np.arange(xmin, xmax + 1, dtype=np.int64)
        ys = np.arange(ymin, ymax + 1, dtype=np.int64)
        px, py = np.meshgrid(xs * den, ys * den)
        inside = np.ones(px.shape, dtype=bool)
        for i in range(k):
            ex, ey = ax[(i + 1) % k] - ax[i], ay[(i + 1) % k] - ay[i]
            inside &= ex * (py - ay[i]) - ey * (px - ax[i]) >= 0
        pts = [(int(x), int(y)) for x, y in zip(px[inside] // den, py[inside] // den)]
    else:  # exact fallback for extreme coordinates
        pts = []
        for y in range(ymin, ymax + 1):
            for x in range(xmin, xmax + 1):
                ok = True
                for i in range(k):
                    ex, ey = ax[(i + 1) % k] - ax[i], ay[(i + 1) % k] - ay[i]
                    if ex * (y * den - ay[i]) - ey * (x * den - ax[i]) < 0:
                        ok = False
                        break
                if ok:
                    pts.append((x, y))
    if not pts:
        raise EmptyRegion(f"no lattice point in {n} * polygon")
    return SiteSet(pts)
