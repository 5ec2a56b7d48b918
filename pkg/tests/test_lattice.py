import random
from fractions import Fraction

import pytest

from latticeflow import (
    ConvexPolygon,
    DualSite,
    EmptyRegion,
    Site,
    bond,
    dual_bond,
    int_of_point,
    neighbors,
    s_of_bond,
    s_of_dual_bond,
    sites_in_scaled_polygon,
    square,
)


def test_neighbors_origin():
    assert neighbors(Site(0, 0)) == [Site(1, 0), Site(0, 1), Site(-1, 0), Site(0, -1)]


def test_neighbors_translated():
    assert neighbors(Site(2, -3)) == [Site(3, -3), Site(2, -2), Site(1, -3), Site(2, -4)]


def test_neighbors_symmetric():
    for n in neighbors(Site(0, 0)):
        assert Site(0, 0) in neighbors(n)


def test_bond_canonical_order():
    assert bond((1, 0), (0, 0)) == bond((0, 0), (1, 0))
    with pytest.raises(ValueError):
        bond((0, 0), (1, 1))


def test_s_of_bond_examples():
    d = s_of_bond(bond((0, 0), (1, 0)))
    assert {p.point for p in d} == {(0.5, -0.5), (0.5, 0.5)}
    d = s_of_bond(bond((0, 0), (0, 1)))
    assert {p.point for p in d} == {(-0.5, 0.5), (0.5, 0.5)}


def test_s_of_dual_bond_examples():
    assert s_of_dual_bond(dual_bond((0, -1), (0, 0))) == bond((0, 0), (1, 0))
    assert s_of_dual_bond(dual_bond((-1, 0), (0, 0))) == bond((0, 0), (0, 1))


def _random_bond(rng):
    x, y = rng.randint(-50, 50), rng.randint(-50, 50)
    if rng.random() < 0.5:
        return bond((x, y), (x + 1, y))
    return bond((x, y), (x, y + 1))


def test_involution_on_random_bonds():
    rng = random.Random(1)
    for _ in range(1000):
        e = _random_bond(rng)
        assert s_of_dual_bond(s_of_bond(e)) == e


def test_involution_on_random_dual_bonds():
    rng = random.Random(2)
    for _ in range(1000):
        e = _random_bond(rng)
        d = s_of_bond(e)
        assert s_of_bond(s_of_dual_bond(d)) == d


def test_bond_and_dual_form_unit_square():
    rng = random.Random(3)
    for _ in range(200):
        e = _random_bond(rng)
        d = s_of_bond(e)
        corners = [(float(p.x), float(p.y)) for p in e] + [p.point for p in d]
        # all pairwise distances of a unit square: four sides 1/sqrt(2)... the
        # quadrangle a,i,b,j has unit diagonals and half-sqrt2 sides
        (ax, ay), (bx, by) = corners[0], corners[1]
        (ix, iy), (jx, jy) = corners[2], corners[3]
        assert (ax - bx) ** 2 + (ay - by) ** 2 == 1.0
        assert (ix - jx) ** 2 + (iy - jy) ** 2 == 1.0
        for px, py in ((ix, iy), (jx, jy)):
            assert (ax - px) ** 2 + (ay - py) ** 2 == 0.5
            assert (bx - px) ** 2 + (by - py) ** 2 == 0.5


def test_int_of_point_examples():
    assert int_of_point((0.5, 0.5)) == DualSite(0, 0)
    assert int_of_point((0.0, 0.0)) == DualSite(0, 0)  # half-open box picks (0.5, 0.5)
    assert int_of_point((3.2, -1.9)).point == (3.5, -1.5)


def test_int_of_point_half_open_boundary():
    # points exactly on the +1/2 face belong to the box whose center is above
    assert int_of_point((1.5, 2.5)) == DualSite(1, 2)
    assert int_of_point((-0.5, -0.5)) == DualSite(-1, -1)


def test_sites_in_square():
    got = sites_in_scaled_polygon(square(1), 1)
    assert set(got.sites) == {Site(x, y) for x in (-1, 0, 1) for y in (-1, 0, 1)}
    assert len(sites_in_scaled_polygon(square(1), 3)) == 49


def test_sites_in_scaled_triangle():
    tri = ConvexPolygon(((0, 0), (1, 0), (0, 1)))
    got = sites_in_scaled_polygon(tri, 2)
    assert set(got.sites) == {
        Site(0, 0),
        Site(1, 0),
        Site(2, 0),
        Site(0, 1),
        Site(1, 1),
        Site(0, 2),
    }


def _oracle_inside(poly, n, x, y):
    """Independent membership test: winding of the point around the scaled
    polygon via per-edge signed areas, exact rationals."""
    verts = [(vx * n, vy * n) for vx, vy in poly.vertices]
    k = len(verts)
    for i in range(k):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % k]
        area2 = (bx - ax) * (Fraction(y) - ay) - (by - ay) * (Fraction(x) - ax)
        if area2 < 0:
            return False
    return True


def test_sites_match_brute_force_oracle():
    polys = [
        square(1),
        ConvexPolygon(((0, 0), (1, 0), (0, 1))),
        ConvexPolygon(((Fraction(-1, 2), Fraction(-1, 3)), (Fraction(3, 2), 0), (1, 1), (0, Fraction(5, 4)))),
    ]
    for poly in polys:
        for n in (1, 2, 5):
            got = set(sites_in_scaled_polygon(poly, n).sites)
            xs = [vx * n for vx, vy in poly.vertices]
            ys = [vy * n for vx, vy in poly.vertices]
            expect = set()
            for x in range(int(min(xs)) - 1, int(max(xs)) + 2):
                for y in range(int(min(ys)) - 1, int(max(ys)) + 2):
                    if _oracle_inside(poly, n, x, y):
                        expect.add(Site(x, y))
            assert got == expect, (poly.vertices, n)


def test_discretization_monotone_when_origin_inside():
    tri = ConvexPolygon(((0, 0), (1, 0), (0, 1)))  # 0 on the boundary still works
    for poly in (square(1), tri):
        prev = set()
        for n in (1, 2, 3, 5, 8):
            cur = set(sites_in_scaled_polygon(poly, n).sites)
            assert prev <= cur
            prev = cur


def test_square_counts_scale_like_area():
    for n in (1, 2, 4, 9):
        assert len(sites_in_scaled_polygon(square(1), n)) == (2 * n + 1) ** 2


def test_discretization_l1_connected():
    # polygons containing a unit ball discretize to an l1-connected set
    for poly, n in ((square(1), 1), (square(1), 3), (ConvexPolygon(((0, 0), (2, 0), (0, 2))), 2)):
        sites = set(sites_in_scaled_polygon(poly, n).sites)
        start = next(iter(sites))
        frontier, seen = {start}, {start}
        while frontier:
            nxt = set()
            for s in frontier:
                for nb in neighbors(s):
                    if nb in sites and nb not in seen:
                        seen.add(nb)
                        nxt.add(nb)
            frontier = nxt
        assert seen == sites


def test_empty_region():
    sliver = ConvexPolygon(
        ((Fraction(1, 4), Fraction(1, 4)), (Fraction(3, 4), Fraction(1, 4)), (Fraction(1, 4), Fraction(3, 4)))
    )
    with pytest.raises(EmptyRegion):
        sites_in_scaled_polygon(sliver, 1)
