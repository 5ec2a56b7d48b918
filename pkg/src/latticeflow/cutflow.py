"""Exact max-flow / min-cut from a finite site set to infinity.

The infinite problem is solved through truncations: V_n is the l1 ball of
radius n, its boundary is contracted to a super-sink and the source set to
a super-source, and the truncated values are nonincreasing in n with the
infinite value as their infimum.  Stabilization (two consecutive equal
values with the cut strictly inside the smaller box) certifies the limit;
the flag is exposed rather than assumed because equality of consecutive
values is only a heuristic certificate when the law has an atom at zero.

Every solve checks strong duality (flow value == cut capacity, as exact
integers) before returning.  A brute-force enumeration of surrounding dual
cycles provides an independent oracle on small boxes: it searches exactly
the dual cycles whose primal bonds lie in V_n, which is the same finite
problem the flow solver truncates to, so the two must agree bond-for-bond
in value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from . import backend
from .capacity import CapacityField, DistributionSpec, mass_at_zero
from .lattice import DualSite, Site, SiteSet, bond, dual_bond, s_of_bond, s_of_dual_bond

ORACLE_RADIUS_GUARD = 8


class SourceTouchesBoundary(Exception):
    """The source set meets or escapes the truncation boundary."""


class NotACycle(Exception):
    """A cutset whose dual image is not a single simple closed path."""


class BudgetExceeded(Exception):
    """A size guard was hit before the requested computation finished."""


def _div_grid(east: np.ndarray, north: np.ndarray) -> np.ndarray:
    """Divergence (sum of outgoing flow) at every site of the grid."""
    H, W = east.shape[0], north.shape[1]
    div = np.zeros((H, W), dtype=np.int64)
    div[:, :-1] += east
    div[:, 1:] -= east
    div[:-1, :] += north
    div[1:, :] -= north
    return div


@dataclass
class FlowAssignment:
    """Antisymmetric flow on the bonds of a boxed region.

    east[iy, ix] is the signed flow on the bond (x0+ix, y0+iy) -> east
    neighbor (positive toward +x), north likewise toward +y; storing one
    signed value per bond makes f(x,y) = -f(y,x) structural.  alive marks
    the sites of the truncated graph, interior the sites where conservation
    is required (alive minus the absorbing boundary).
    """

    origin: Tuple[int, int]
    east: np.ndarray
    north: np.ndarray
    alive: np.ndarray
    interior: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return self.alive.shape

    def _local(self, site) -> Tuple[int, int]:
        return int(site[0]) - self.origin[0], int(site[1]) - self.origin[1]

    def contains(self, site) -> bool:
        ix, iy = self._local(site)
        H, W = self.alive.shape
        return 0 <= ix < W and 0 <= iy < H

    def flow(self, a, b) -> int:
        """Oriented flow f(a, b) for adjacent sites a, b."""
        ax, ay = self._local(a)
        bx, by = self._local(b)
        if bx == ax + 1 and by == ay:
            return int(self.east[ay, ax])
        if bx == ax - 1 and by == ay:
            return -int(self.east[ay, bx])
        if by == ay + 1 and bx == ax:
            return int(self.north[ay, ax])
        if by == ay - 1 and bx == ax:
            return -int(self.north[by, ax])
        raise ValueError("sites are not adjacent")

    def divergence(self, site) -> int:
        ix, iy = self._local(site)
        H, W = self.alive.shape
        d = 0
        if ix < W - 1:
            d += int(self.east[iy, ix])
        if ix > 0:
            d -= int(self.east[iy, ix - 1])
        if iy < H - 1:
            d += int(self.north[iy, ix])
        if iy > 0:
            d -= int(self.north[iy - 1, ix])
        return d

    def div_grid(self) -> np.ndarray:
        return _div_grid(self.east, self.north)

    def copy(self) -> "FlowAssignment":
        return FlowAssignment(
            self.origin,
            self.east.copy(),
            self.north.copy(),
            self.alive.copy(),
            self.interior.copy(),
        )

    def translated(self, dx: int, dy: int) -> "FlowAssignment":
        return FlowAssignment(
            (self.origin[0] + dx, self.origin[1] + dy),
            self.east,
            self.north,
            self.alive,
            self.interior,
        )

    @classmethod
    def zero(cls, x0: int, y0: int, x1: int, y1: int) -> "FlowAssignment":
        """The zero flow on a full box (every site interior)."""
        W, H = x1 - x0 + 1, y1 - y0 + 1
        return cls(
            (x0, y0),
            np.zeros((H, W - 1), np.int64),
            np.zeros((H - 1, W), np.int64),
            np.ones((H, W), bool),
            np.ones((H, W), bool),
        )


@dataclass(frozen=True)
class Cutset:
    """Set of primal bonds separating the source from the box boundary."""

    bonds: frozenset
    source: SiteSet

    def total_micro(self, field: CapacityField) -> int:
        return sum(field.capacity_micro(e) for e in self.bonds)

    def max_endpoint_norm(self) -> int:
        if not self.bonds:
            return 0
        return max(abs(p.x) + abs(p.y) for e in self.bonds for p in e)


@dataclass(frozen=True)
class DualCycle:
    """Closed walk of dual sites (first == last) surrounding the source."""

    sites: Tuple[DualSite, ...]

    def __post_init__(self):
        if len(self.sites) < 5 or self.sites[0] != self.sites[-1]:
            raise ValueError("a dual cycle is a closed walk of >= 4 bonds")

    def bonds(self) -> List:
        return [
            (self.sites[i], self.sites[i + 1]) for i in range(len(self.sites) - 1)
        ]

    def weight_micro(self, field: CapacityField) -> int:
        return sum(
            field.capacity_micro(s_of_dual_bond(dual_bond(a, b))) for a, b in self.bonds()
        )


@dataclass
class MaxFlowResult:
    value_micro: int
    flow: FlowAssignment
    mincut: Cutset
    box_used: int
    stabilized: bool

    def to_json_dict(self) -> dict:
        cut = sorted((e.a.x, e.a.y, e.b.x, e.b.y) for e in self.mincut.bonds)
        return {
            "value_micro": int(self.value_micro),
            "box_used": int(self.box_used),
            "stabilized": bool(self.stabilized),
            "mincut": [list(b) for b in cut],
            "source_size": len(self.mincut.source),
        }


def _as_siteset(A) -> SiteSet:
    return A if isinstance(A, SiteSet) else SiteSet(A)


def truncated_maxflow(field: CapacityField, A, n: int) -> MaxFlowResult:
    """Exact integer max flow from A to the boundary of V_n = {|x|_1 <= n}.

    The min cut is read off the residual graph: saturated bonds crossing
    the source-side reachable set, with any zero-capacity islands folded in
    so a minimal (hence dual-cycle) cutset comes out when A is connected.
    """
    A = _as_siteset(A)
    if A.radius >= n:
        raise SourceTouchesBoundary(
            f"source radius {A.radius} must be < box radius {n}"
        )
    S = 2 * n + 1
    absc = np.abs(np.arange(-n, n + 1, dtype=np.int64))
    l1 = np.add.outer(absc, absc)  # [iy, ix] -> |y| + |x|
    alive = l1 <= n
    boundary = l1 == n
    ids = np.arange(S * S, dtype=np.int64).reshape(S, S)

    east_cap = field.bond_micro_grid(-n, -n, S - 1, S, 0)
    north_cap = field.bond_micro_grid(-n, -n, S, S - 1, 1)
    valid_e = alive[:, :-1] & alive[:, 1:]
    valid_n = alive[:-1, :] & alive[1:, :]

    eu, ev, ec = ids[:, :-1][valid_e], ids[:, 1:][valid_e], east_cap[valid_e]
    nu, nv, nc = ids[:-1, :][valid_n], ids[1:, :][valid_n], north_cap[valid_n]

    amask = np.zeros((S, S), dtype=bool)
    for s_ in A:
        amask[s_.y + n, s_.x + n] = True
    a_ids = ids[amask]
    b_ids = ids[boundary]

    inf_cap = int(ec.sum()) + int(nc.sum()) + 1
    s_node, t_node = S * S, S * S + 1
    n_lat = len(eu) + len(nu)

    eu_all = np.concatenate([eu, nu, np.full(len(a_ids), s_node, np.int64), b_ids])
    ev_all = np.concatenate([ev, nv, a_ids, np.full(len(b_ids), t_node, np.int64)])
    lat_caps = np.concatenate([ec, nc])
    capf = np.concatenate(
        [lat_caps, np.full(len(a_ids) + len(b_ids), inf_cap, np.int64)]
    )
    capr = np.concatenate(
        [lat_caps, np.zeros(len(a_ids) + len(b_ids), np.int64)]
    )

    total, res, reach = backend.dinic_maxflow(
        S * S + 2, eu_all, ev_all, capf, capr, s_node, t_node
    )
    value = int(total)

    res_fwd = np.asarray(res)[0::2][:n_lat]
    east_flow = np.zeros((S, S - 1), np.int64)
    east_flow[valid_e] = ec - res_fwd[: len(eu)]
    north_flow = np.zeros((S - 1, S), np.int64)
    north_flow[valid_n] = nc - res_fwd[len(eu):]

    reach_sites = np.asarray(reach)[: S * S].astype(bool).reshape(S, S) & alive
    rstar = reach_sites
    if mass_at_zero(field.spec) > 0:
        # fold zero-capacity islands (unreachable pockets fully surrounded by
        # the source side) into the source side; they carry no cut weight
        comp = alive & ~reach_sites
        outside = comp & boundary
        while True:
            grown = outside.copy()
            grown[1:, :] |= outside[:-1, :] & comp[1:, :]
            grown[:-1, :] |= outside[1:, :] & comp[:-1, :]
            grown[:, 1:] |= outside[:, :-1] & comp[:, 1:]
            grown[:, :-1] |= outside[:, 1:] & comp[:, :-1]
            if np.array_equal(grown, outside):
                break
            outside = grown
        rstar = reach_sites | (comp & ~outside)

    cut_e = valid_e & (rstar[:, :-1] != rstar[:, 1:])
    cut_n = valid_n & (rstar[:-1, :] != rstar[1:, :])
    cut_value = int(east_cap[cut_e].sum()) + int(north_cap[cut_n].sum())
    if cut_value != value:
        raise RuntimeError(
            f"internal: duality violated (flow {value}, cut {cut_value})"
        )

    bonds = []
    for iy, ix in zip(*np.nonzero(cut_e)):
        bonds.append(bond((ix - n, iy - n), (ix - n + 1, iy - n)))
    for iy, ix in zip(*np.nonzero(cut_n)):
        bonds.append(bond((ix - n, iy - n), (ix - n, iy - n + 1)))

    flow = FlowAssignment(
        origin=(-n, -n),
        east=east_flow,
        north=north_flow,
        alive=alive,
        interior=alive & ~boundary,
    )
    out_of_A = int(flow.div_grid()[amask].sum())
    if out_of_A != value:
        raise RuntimeError(
            f"internal: flow out of source {out_of_A} != value {value}"
        )
    check = verify_flow(field, flow, A)
    if not check:  # cheap relative to the solve; catches kernel regressions
        raise RuntimeError(
            f"internal: infeasible flow ({check.reason} at {check.where})"
        )
    return MaxFlowResult(value, flow, Cutset(frozenset(bonds), A), n, False)


def _cut_strictly_inside(cut: Cutset, m: int) -> bool:
    return cut.max_endpoint_norm() < m


def mincut_infinity(field: CapacityField, A, nmax_factor: int = 512) -> MaxFlowResult:
    """Min cut (== max flow) separating A from infinity, by box doubling.

    Starts at radius(A) + 8 and doubles until two consecutive values agree
    and the cut sits strictly inside the smaller box; returns with
    stabilized=False (best value so far) when the doubling would pass
    nmax_factor * max(radius, 1).
    """
    A = _as_siteset(A)
    n = A.radius + 8
    n_max = nmax_factor * max(A.radius, 1)
    prev: Optional[MaxFlowResult] = None
    while True:
        cur = truncated_maxflow(field, A, n)
        if (
            prev is not None
            and cur.value_micro == prev.value_micro
            and _cut_strictly_inside(cur.mincut, prev.box_used)
        ):
            cur.stabilized = True
            return cur
        if 2 * n > n_max:
            return cur
        prev = cur
        n *= 2


@dataclass
class FlowCheck:
    """Outcome of a feasibility check, with the first violation if any."""

    ok: bool
    reason: Optional[str] = None
    where: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_flow(field: CapacityField, flow: FlowAssignment, A) -> FlowCheck:
    """Check |f| <= capacity on every bond and zero divergence at every
    interior site outside A."""
    A = _as_siteset(A)
    x0, y0 = flow.origin
    H, W = flow.alive.shape
    east_cap = field.bond_micro_grid(x0, y0, W - 1, H, 0)
    north_cap = field.bond_micro_grid(x0, y0, W, H - 1, 1)
    valid_e = flow.alive[:, :-1] & flow.alive[:, 1:]
    valid_n = flow.alive[:-1, :] & flow.alive[1:, :]

    bad = (np.abs(flow.east) > east_cap) & valid_e | (flow.east != 0) & ~valid_e
    if bad.any():
        iy, ix = np.argwhere(bad)[0]
        return FlowCheck(False, "capacity", ((x0 + ix, y0 + iy), (x0 + ix + 1, y0 + iy)))
    bad = (np.abs(flow.north) > north_cap) & valid_n | (flow.north != 0) & ~valid_n
    if bad.any():
        iy, ix = np.argwhere(bad)[0]
        return FlowCheck(False, "capacity", ((x0 + ix, y0 + iy), (x0 + ix, y0 + iy + 1)))

    amask = np.zeros((H, W), dtype=bool)
    for s_ in A:
        ix, iy = s_.x - x0, s_.y - y0
        if 0 <= ix < W and 0 <= iy < H:
            amask[iy, ix] = True
    bad = (flow.div_grid() != 0) & flow.interior & ~amask
    if bad.any():
        iy, ix = np.argwhere(bad)[0]
        return FlowCheck(False, "divergence", (x0 + ix, y0 + iy))
    return FlowCheck(True)


def flow_value(flow: FlowAssignment, A) -> int:
    """Total divergence over the source sites; internal bonds cancel by
    antisymmetry."""
    A = _as_siteset(A)
    return sum(flow.divergence(s_) for s_ in A)


def cutset_to_cycle(cut) -> DualCycle:
    """Order the dual image of a minimal cutset into a closed dual walk.

    Starts at the smallest dual site, walks toward its smaller neighbor;
    raises NotACycle when the image branches or is disconnected.
    """
    bonds = cut.bonds if isinstance(cut, Cutset) else frozenset(cut)
    if not bonds:
        raise NotACycle("empty cutset")
    adj: Dict[DualSite, List[DualSite]] = {}
    n_dual = 0
    for e in sorted(bonds):
        d = s_of_bond(e)
        adj.setdefault(d.a, []).append(d.b)
        adj.setdefault(d.b, []).append(d.a)
        n_dual += 1
    for site, nbrs in adj.items():
        if len(nbrs) != 2:
            raise NotACycle(f"dual degree {len(nbrs)} at {site}")
    start = min(adj)
    walk = [start, min(adj[start])]
    while walk[-1] != start:
        a, b = adj[walk[-1]]
        walk.append(b if a == walk[-2] else a)
    if len(walk) - 1 != n_dual:
        raise NotACycle("cutset image is disconnected")
    return DualCycle(tuple(walk))


def cut_separates(bonds: Iterable, A, n: int) -> bool:
    """True iff removing the bonds disconnects A from the boundary of V_n."""
    A = _as_siteset(A)
    S = 2 * n + 1
    absc = np.abs(np.arange(-n, n + 1, dtype=np.int64))
    l1 = np.add.outer(absc, absc)
    alive = l1 <= n
    boundary = l1 == n
    ok_e = alive[:, :-1] & alive[:, 1:]
    ok_n = alive[:-1, :] & alive[1:, :]
    for e in bonds:
        (ax, ay), (bx, by) = e
        if bx == ax + 1:
            ok_e[ay + n, ax + n] = False
        else:
            ok_n[ay + n, ax + n] = False
    seen = np.zeros((S, S), dtype=bool)
    for s_ in A:
        seen[s_.y + n, s_.x + n] = True
    while True:
        grown = seen.copy()
        grown[:, 1:] |= seen[:, :-1] & ok_e
        grown[:, :-1] |= seen[:, 1:] & ok_e
        grown[1:, :] |= seen[:-1, :] & ok_n
        grown[:-1, :] |= seen[1:, :] & ok_n
        if np.array_equal(grown, seen):
            break
        seen = grown
    return not (seen & boundary).any()


def brute_force_min_cycle(field: CapacityField, A, box_radius: int) -> int:
    """Minimum weight over all simple dual cycles around A whose primal
    bonds lie in V_box_radius, by pruned depth-first enumeration.

    This searches exactly the cut space of `truncated_maxflow` at the same
    radius, so the two values must coincide on every instance; that makes
    this the independent oracle for the flow solver.  Exponential in the
    box, hence the hard radius guard.
    """
    if box_radius > ORACLE_RADIUS_GUARD:
        raise BudgetExceeded(
            f"oracle radius {box_radius} exceeds guard {ORACLE_RADIUS_GUARD}"
        )
    A = _as_siteset(A)
    x0b, y0b, x1b, y1b = A.bbox
    ring_need = 1 + max(abs(x) + abs(y) for x in (x0b, x1b) for y in (y0b, y1b))
    if ring_need > box_radius:
        raise ValueError(
            "A's bounding-box ring must fit inside the oracle box "
            f"(needs radius {ring_need}, got {box_radius})"
        )

    R = box_radius
    adj: Dict[DualSite, List[Tuple[DualSite, int]]] = {}
    for x in range(-R, R + 1):
        for y in range(-R, R + 1):
            if abs(x) + abs(y) > R:
                continue
            for dx, dy in ((1, 0), (0, 1)):
                if abs(x + dx) + abs(y + dy) > R:
                    continue
                e = bond((x, y), (x + dx, y + dy))
                d = s_of_bond(e)
                w = field.capacity_micro(e)
                adj.setdefault(d.a, []).append((d.b, w))
                adj.setdefault(d.b, []).append((d.a, w))

    sites = sorted(adj)
    index = {s_: i for i, s_ in enumerate(sites)}
    nbrs: List[List[Tuple[int, int]]] = [[] for _ in sites]
    for s_, lst in adj.items():
        nbrs[index[s_]] = sorted((index[t], w) for t, w in lst)

    a_list = [(s_.x, s_.y) for s_ in A]

    def encloses_all(edges) -> bool:
        # ray-crossing parity along +x: a vertical dual bond (i, j)-(i, j+1)
        # crosses the ray from (sx, sy) iff j + 1 == sy and i >= sx
        for sx, sy in a_list:
            crossings = 0
            for ui, vi in edges:
                ai, aj = sites[ui]
                bi, bj = sites[vi]
                if ai == bi and (min(aj, bj) + 1 == sy) and ai >= sx:
                    crossings += 1
            if crossings % 2 == 0:
                return False
        return True

    # initial upper bound: the dual ring around A's bounding box
    ring = []
    for i in range(x0b - 1, x1b + 1):
        ring.append(DualSite(i, y0b - 1))
    for j in range(y0b, y1b + 1):
        ring.append(DualSite(x1b, j))
    for i in range(x1b - 1, x0b - 2, -1):
        ring.append(DualSite(i, y1b))
    for j in range(y1b - 1, y0b - 1, -1):
        ring.append(DualSite(x0b - 1, j))
    ring.append(ring[0])
    best = 0
    for a, b in zip(ring, ring[1:]):
        best += field.capacity_micro(s_of_dual_bond(dual_bond(a, b)))

    n_sites = len(sites)
    onpath = bytearray(n_sites)
    for start in range(n_sites):
        path = [start]
        ptrs = [0]
        wsum = [0]
        edges: List[Tuple[int, int]] = []
        onpath[start] = 1
        while path:
            u = path[-1]
            advanced = False
            while ptrs[-1] < len(nbrs[u]):
                v, w = nbrs[u][ptrs[-1]]
                ptrs[-1] += 1
                if v == start and len(path) >= 4:
                    cw = wsum[-1] + w
                    if cw < best and encloses_all(edges + [(u, start)]):
                        best = cw
                    continue
                if v <= start or onpath[v]:
                    continue
                nw = wsum[-1] + w
                if nw >= best:
                    continue
                path.append(v)
                ptrs.append(0)
                wsum.append(nw)
                edges.append((u, v))
                onpath[v] = 1
                advanced = True
                break
            if not advanced:
                onpath[u] = 0
                path.pop()
                ptrs.pop()
                wsum.pop()
                if edges:
                    edges.pop()
    return best


class MengerResult(NamedTuple):
    count: int
    paths: List[tuple]
    maxflow: MaxFlowResult


def menger_disjoint_paths(p_open, A, n: int, seed: int) -> MengerResult:
    """Maximum collection of edge-disjoint open paths from A to the boundary
    of V_n, under Bernoulli(p_open) bond percolation.

    Open bonds get capacity 1 and closed bonds 0, so the path count equals
    the open-bond min cut by strong duality; the paths are read off the
    integer flow by unit-path tracing with loop erasure.
    """
    field = CapacityField(DistributionSpec.bernoulli(p_open), seed, scale=1)
    mf = truncated_maxflow(field, A, n)
    paths = _decompose_unit_paths(mf.flow, _as_siteset(A))
    if len(paths) != mf.value_micro:
        raise RuntimeError(
            f"internal: decomposed {len(paths)} paths for flow {mf.value_micro}"
        )
    return MengerResult(int(mf.value_micro), paths, mf)


def _decompose_unit_paths(flow: FlowAssignment, A: SiteSet) -> List[tuple]:
    east = flow.east.copy()
    north = flow.north.copy()
    x0, y0 = flow.origin
    H, W = flow.alive.shape
    boundary = flow.alive & ~flow.interior

    def site_div(ix: int, iy: int) -> int:
        d = 0
        if ix < W - 1:
            d += east[iy, ix]
        if ix > 0:
            d -= east[iy, ix - 1]
        if iy < H - 1:
            d += north[iy, ix]
        if iy > 0:
            d -= north[iy - 1, ix]
        return int(d)

    paths = []
    limit = 4 * H * W + 4
    for s_ in A:
        ix, iy = s_.x - x0, s_.y - y0
        while site_div(ix, iy) > 0:
            cx, cy = ix, iy
            trail = [(cx, cy)]
            seen = {(cx, cy): 0}
            steps = 0
            while not boundary[cy, cx]:
                steps += 1
                if steps > limit:
                    raise RuntimeError("internal: unit path tracing did not terminate")
                if cx + 1 < W and east[cy, cx] > 0:
                    east[cy, cx] -= 1
                    cx += 1
                elif cy + 1 < H and north[cy, cx] > 0:
                    north[cy, cx] -= 1
                    cy += 1
                elif cx > 0 and east[cy, cx - 1] < 0:
                    east[cy, cx - 1] += 1
                    cx -= 1
                elif cy > 0 and north[cy - 1, cx] < 0:
                    north[cy - 1, cx] += 1
                    cy -= 1
                else:
                    raise RuntimeError("internal: stranded flow unit")
                key = (cx, cy)
                if key in seen:  # loop erased; its flow is already cancelled
                    k = seen[key]
                    for dropped in trail[k + 1:]:
                        seen.pop(dropped)
                    del trail[k + 1:]
                else:
                    seen[key] = len(trail)
                    trail.append(key)
            paths.append(tuple(Site(x0 + px, y0 + py) for px, py in trail))
    return paths
