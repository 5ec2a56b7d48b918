"""Convex polygons with rational vertices and the limit functional on them.

The limit of the scaled min-cut over a convex polygon is the mu-length of
its boundary: the sum of the tabulated norm over the side vectors.  All
polygon arithmetic is exact rational, so homogeneity and containment tests
hold bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import cos, gcd, pi, sin
from typing import Sequence, Tuple

from .fpp import MuTable, mu_eval

NGON_DENOMINATOR = 1 << 16  # vertex rounding grid for regular polygons

Point = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class ConvexPolygon:
    """Counterclockwise vertex list, strictly convex at every vertex."""

    vertices: Tuple[Point, ...]

    def __post_init__(self):
        verts = tuple((Fraction(x), Fraction(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        k = len(verts)
        if k < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        for i in range(k):
            ax, ay = verts[i]
            bx, by = verts[(i + 1) % k]
            cx, cy = verts[(i + 2) % k]
            cross = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
            if cross <= 0:
                raise ValueError(
                    "vertices must turn strictly left at every corner "
                    f"(violated at index {(i + 1) % k})"
                )

    def side_vectors(self) -> list:
        """The vectors s_i - s_{i+1}, one per side (cyclic)."""
        k = len(self.vertices)
        out = []
        for i in range(k):
            (ax, ay), (bx, by) = self.vertices[i], self.vertices[(i + 1) % k]
            out.append((ax - bx, ay - by))
        return out

    def side_directions(self) -> list:
        """Primitive integer direction of every side."""
        return [primitive_decomposition(d)[1] for d in self.side_vectors()]

    def centroid(self) -> Point:
        k = len(self.vertices)
        sx = sum(v[0] for v in self.vertices)
        sy = sum(v[1] for v in self.vertices)
        return (sx / k, sy / k)


@dataclass(frozen=True)
class IValue:
    """Boundary mu-length of a polygon under a given table (micro-units)."""

    value_micro: Fraction
    polygon: ConvexPolygon
    table: MuTable

    def __float__(self):
        return float(self.value_micro)


def primitive_decomposition(d) -> Tuple[Fraction, Tuple[int, int]]:
    """Write a rational vector as q * p with q > 0 rational and p a
    primitive integer vector."""
    dx, dy = Fraction(d[0]), Fraction(d[1])
    if dx == 0 and dy == 0:
        raise ValueError("zero vector")
    den = dx.denominator * dy.denominator // gcd(dx.denominator, dy.denominator)
    nx, ny = int(dx * den), int(dy * den)
    g = gcd(abs(nx), abs(ny))
    return Fraction(g, den), (nx // g, ny // g)


def i_functional(polygon: ConvexPolygon, table: MuTable) -> IValue:
    """Sum of the tabulated norm over the polygon's side vectors.

    Exactly linear in the side vectors, hence exactly homogeneous under
    rational scaling.  Propagates MissingDirection for untabulated sides.
    """
    total = Fraction(0)
    for d in polygon.side_vectors():
        q, p = primitive_decomposition(d)
        total += q * mu_eval(table, p)
    return IValue(value_micro=total, polygon=polygon, table=table)


def scale(polygon: ConvexPolygon, lam) -> ConvexPolygon:
    """The polygon lam * P, exact rational arithmetic."""
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("scaling factor must be > 0")
    return ConvexPolygon(tuple((x * lam, y * lam) for x, y in polygon.vertices))


def contains_origin_interior(polygon: ConvexPolygon) -> bool:
    """Exact test that 0 lies strictly inside (boundary counts as outside)."""
    k = len(polygon.vertices)
    for i in range(k):
        (ax, ay), (bx, by) = polygon.vertices[i], polygon.vertices[(i + 1) % k]
        if (bx - ax) * (-ay) - (by - ay) * (-ax) <= 0:
            return False
    return True


def convex_hull(points: Sequence[Point]) -> list:
    """Monotone-chain hull, collinear points dropped; counterclockwise."""
    pts = sorted(set((Fraction(x), Fraction(y)) for x, y in points))
    if len(pts) < 3:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                (ax, ay), (bx, by) = out[-2], out[-1]
                if (bx - ax) * (p[1] - by) - (by - ay) * (p[0] - bx) > 0:
                    break
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(list(reversed(pts)))
    return lower[:-1] + upper[:-1]


def regular_polygon(k: int, r) -> ConvexPolygon:
    """Convex hull of k points approximating the radius-r circle, vertices
    rounded to the 2^-16 rational grid; contains 0 in its interior."""
    if k < 3:
        raise ValueError("k must be >= 3")
    r = Fraction(r)
    if r <= 0:
        raise ValueError("r must be > 0")
    rf = float(r)
    pts = []
    for j in range(k):
        ang = 2 * pi * j / k
        pts.append(
            (
                Fraction(round(cos(ang) * rf * NGON_DENOMINATOR), NGON_DENOMINATOR),
                Fraction(round(sin(ang) * rf * NGON_DENOMINATOR), NGON_DENOMINATOR),
            )
        )
    hull = convex_hull(pts)
    if len(hull) < 3:
        raise ValueError(f"radius {r} is too small for the rational rounding grid")
    return ConvexPolygon(tuple(hull))


def square(r) -> ConvexPolygon:
    """The axis-aligned square with vertices (+-r, +-r)."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError("r must be > 0")
    return ConvexPolygon(((r, -r), (r, r), (-r, r), (-r, -r)))


def parse_polygon(text: str) -> ConvexPolygon:
    """Parse the CLI forms square:R, ngon:K:R, and @file."""
    text = text.strip()
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            return polygon_from_file_text(fh.read())
    parts = text.split(":")
    if parts[0] == "square" and len(parts) == 2:
        return square(Fraction(parts[1]))
    if parts[0] == "ngon" and len(parts) == 3:
        return regular_polygon(int(parts[1]), Fraction(parts[2]))
    raise ValueError(f"unknown polygon form {text!r} (square:R, ngon:K:R or @file)")


def polygon_from_file_text(text: str) -> ConvexPolygon:
    """One 'x y' pair per line (rational tokens), counterclockwise."""
    verts = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        sx, sy = line.split()
        verts.append((Fraction(sx), Fraction(sy)))
    return ConvexPolygon(tuple(verts))


def polygon_to_file_text(polygon: ConvexPolygon) -> str:
    def tok(v: Fraction) -> str:
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

    return "\n".join(f"{tok(x)} {tok(y)}" for x, y in polygon.vertices) + "\n"
