import random
from fractions import Fraction

import pytest

from latticeflow import (
    MICRO_SCALE,
    BudgetExceeded,
    CapacityField,
    DistributionSpec,
    DualSite,
    FlowAssignment,
    NotACycle,
    SiteSet,
    SourceTouchesBoundary,
    bond,
    brute_force_min_cycle,
    cut_separates,
    cutset_to_cycle,
    flow_value,
    menger_disjoint_paths,
    mincut_infinity,
    truncated_maxflow,
    verify_flow,
)

CONST1 = DistributionSpec.constant(1)
EXP1 = DistributionSpec.exponential(1)
BERN6 = DistributionSpec.bernoulli(Fraction(3, 5))

ORIGIN = SiteSet([(0, 0)])


def block(k):
    return SiteSet([(x, y) for x in range(-k, k + 1) for y in range(-k, k + 1)])


class PatchedField:
    """Capacity override on selected bonds; the oracle only needs
    capacity_micro, so this is enough to build zero-capacity moats."""

    def __init__(self, base, patch):
        self.base = base
        self.patch = patch
        self.spec = base.spec
        self.scale = base.scale

    def capacity_micro(self, e):
        return self.patch.get(e, self.base.capacity_micro(e))


def test_degree_bound_at_origin():
    f = CapacityField(CONST1, 3)
    res = truncated_maxflow(f, ORIGIN, 5)
    assert res.value_micro == 4 * MICRO_SCALE
    assert res.mincut.bonds == frozenset(
        {bond((0, 0), (1, 0)), bond((0, 0), (0, 1)), bond((-1, 0), (0, 0)), bond((0, -1), (0, 0))}
    )


def test_block_cut_closed_form():
    f = CapacityField(CONST1, 3)
    for k in (1, 2, 3):
        res = truncated_maxflow(f, block(k), 4 * k + 8)
        assert res.value_micro == 4 * (2 * k + 1) * MICRO_SCALE


def test_source_touching_boundary_rejected():
    f = CapacityField(CONST1, 3)
    with pytest.raises(SourceTouchesBoundary):
        truncated_maxflow(f, ORIGIN, 0)
    with pytest.raises(SourceTouchesBoundary):
        truncated_maxflow(f, block(2), 4)


def test_truncated_matches_oracle_fixed_seed():
    f = CapacityField(DistributionSpec.bernoulli(Fraction(1, 2)), 123)
    res = truncated_maxflow(f, ORIGIN, 4)
    assert res.value_micro == brute_force_min_cycle(f, ORIGIN, 4)


def test_oracle_agreement_random_batch():
    for law in (BERN6, EXP1):
        for seed in range(20):
            f = CapacityField(law, seed)
            assert truncated_maxflow(f, ORIGIN, 4).value_micro == brute_force_min_cycle(
                f, ORIGIN, 4
            )


def test_mincut_infinity_stabilizes_constant():
    f = CapacityField(CONST1, 9)
    res = mincut_infinity(f, ORIGIN)
    assert res.value_micro == 4 * MICRO_SCALE
    assert res.stabilized
    assert res.box_used == 16  # stabilized at the first doubling


def test_mincut_infinity_block_matches_oracle():
    f = CapacityField(DistributionSpec.bernoulli(Fraction(7, 10)), 2027)
    res = mincut_infinity(f, block(1))
    assert res.stabilized
    assert res.value_micro == brute_force_min_cycle(f, block(1), 8)


def test_value_monotone_in_source():
    rng = random.Random(12)
    f = CapacityField(EXP1, 31)
    for _ in range(50):
        k = rng.randint(0, 1)
        small = block(k)
        extra = [(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(3)]
        large = SiteSet(list(small) + extra)
        vs = truncated_maxflow(f, small, 8).value_micro
        vl = truncated_maxflow(f, large, 8).value_micro
        assert vs <= vl


def test_value_nonincreasing_in_box():
    for seed in range(5):
        f = CapacityField(BERN6, 100 + seed)
        prev = None
        for n in (4, 8, 16):
            v = truncated_maxflow(f, ORIGIN, n).value_micro
            if prev is not None:
                assert v <= prev
            prev = v


def test_cut_disconnects_source_from_boundary():
    for seed in range(10):
        f = CapacityField(BERN6, 300 + seed)
        res = truncated_maxflow(f, ORIGIN, 6)
        assert cut_separates(res.mincut.bonds, ORIGIN, 6)


def test_zero_flow_verifies():
    flow = FlowAssignment.zero(-3, -3, 3, 3)
    for law in (CONST1, EXP1):
        assert verify_flow(CapacityField(law, 1), flow, ORIGIN)
    assert flow_value(flow, ORIGIN) == 0


def test_maxflow_output_verifies_100_instances():
    for seed in range(100):
        law = (EXP1, BERN6, CONST1)[seed % 3]
        f = CapacityField(law, seed)
        res = truncated_maxflow(f, ORIGIN, 5)
        assert verify_flow(f, res.flow, ORIGIN)
        assert flow_value(res.flow, ORIGIN) == res.value_micro


def test_perturbation_breaks_feasibility():
    f = CapacityField(EXP1, 77)
    res = truncated_maxflow(f, ORIGIN, 5)
    # push one more unit along a saturated cut bond, in its flow direction
    e = sorted(res.mincut.bonds)[0]
    pert = res.flow.copy()
    x0, y0 = pert.origin
    (ax, ay), (bx, by) = e
    if bx == ax + 1:
        arr, idx = pert.east, (ay - y0, ax - x0)
    else:
        arr, idx = pert.north, (ay - y0, ax - x0)
    arr[idx] += 1 if arr[idx] >= 0 else -1
    assert not verify_flow(f, pert, ORIGIN)
    # and a break at an interior bond away from the source: either its
    # capacity or the endpoint divergences give way
    pert2 = res.flow.copy()
    iy, ix = 0 - (-5), 2 - (-5)  # bond (2,0)-(3,0), interior on both ends
    assert pert2.alive[iy, ix] and pert2.alive[iy, ix + 1]
    pert2.east[iy, ix] += 1
    chk = verify_flow(f, pert2, ORIGIN)
    assert not chk
    assert chk.reason in ("capacity", "divergence")


def test_flow_value_translation_invariant():
    f = CapacityField(EXP1, 50)
    res = truncated_maxflow(f, ORIGIN, 5)
    rng = random.Random(4)
    for _ in range(10):
        dx, dy = rng.randint(-30, 30), rng.randint(-30, 30)
        moved = res.flow.translated(dx, dy)
        shifted = SiteSet([(dx, dy)])
        assert flow_value(moved, shifted) == res.value_micro


def test_cutset_to_cycle_unit_square():
    f = CapacityField(CONST1, 1)
    res = truncated_maxflow(f, ORIGIN, 5)
    cyc = cutset_to_cycle(res.mincut)
    assert len(cyc.sites) - 1 == 4
    assert set(cyc.sites[:-1]) == {
        DualSite(0, 0),
        DualSite(-1, 0),
        DualSite(0, -1),
        DualSite(-1, -1),
    }
    assert cyc.weight_micro(f) == res.value_micro


def test_cutset_to_cycle_block_perimeter():
    f = CapacityField(CONST1, 1)
    res = truncated_maxflow(f, block(1), 8)
    cyc = cutset_to_cycle(res.mincut)
    assert len(cyc.sites) - 1 == 12
    assert cyc.weight_micro(f) == res.value_micro


def test_cycle_weight_equality_random():
    for seed in range(20):
        f = CapacityField(EXP1, 600 + seed)
        res = mincut_infinity(f, ORIGIN)
        cyc = cutset_to_cycle(res.mincut)
        assert cyc.weight_micro(f) == res.value_micro


def test_not_a_cycle_for_disconnected_image():
    # two separate unit squares: every dual degree is 2 but the image has
    # two components
    far = [bond((10, 10), (11, 10)), bond((10, 10), (10, 11)),
           bond((9, 10), (10, 10)), bond((10, 9), (10, 10))]
    near = [bond((0, 0), (1, 0)), bond((0, 0), (0, 1)),
            bond((-1, 0), (0, 0)), bond((0, -1), (0, 0))]
    with pytest.raises(NotACycle):
        cutset_to_cycle(near + far)


def test_not_a_cycle_for_branching_image():
    bonds = [bond((0, 0), (1, 0)), bond((1, 0), (2, 0)), bond((1, 0), (1, 1))]
    with pytest.raises(NotACycle):
        cutset_to_cycle(bonds)


def test_oracle_constant_unit_square():
    f = CapacityField(CONST1, 1)
    assert brute_force_min_cycle(f, ORIGIN, 3) == 4 * MICRO_SCALE


def test_oracle_guard():
    f = CapacityField(CONST1, 1)
    with pytest.raises(BudgetExceeded):
        brute_force_min_cycle(f, ORIGIN, 9)
    with pytest.raises(ValueError):
        brute_force_min_cycle(f, block(3), 3)


def test_mincut_infinity_budget_reports_best_value():
    f = CapacityField(CONST1, 1)
    res = mincut_infinity(f, ORIGIN, nmax_factor=1)
    assert not res.stabilized  # budget hit before a doubling could confirm
    assert res.value_micro == 4 * MICRO_SCALE  # best value still reported


def test_oracle_zero_moat():
    base = CapacityField(EXP1, 5)
    # zero out the 12 bonds whose duals ring the 3x3 block around the origin
    ring_bonds = {}
    for x in (-1, 0, 1):
        ring_bonds[bond((x, 1), (x, 2))] = 0
        ring_bonds[bond((x, -2), (x, -1))] = 0
        ring_bonds[bond((1, x), (2, x))] = 0
        ring_bonds[bond((-2, x), (-1, x))] = 0
    f = PatchedField(base, ring_bonds)
    assert brute_force_min_cycle(f, ORIGIN, 4) == 0


def test_menger_degree_bound_and_empty():
    full = menger_disjoint_paths(1, ORIGIN, 5, 1)
    assert full.count == 4
    assert len(full.paths) == 4
    empty = menger_disjoint_paths(0, ORIGIN, 5, 1)
    assert empty.count == 0 and empty.paths == []


def test_menger_block_full_lattice():
    res = menger_disjoint_paths(1, block(2), 12, 3)
    assert res.count == 4 * (2 * 2 + 1)


def test_menger_duality_and_disjointness():
    for trial in range(60):
        p = Fraction(6, 10) if trial % 2 == 0 else Fraction(8, 10)
        res = menger_disjoint_paths(p, ORIGIN, 8, 900 + trial)
        assert res.count == res.maxflow.value_micro  # scale 1: bond units
        field = CapacityField(DistributionSpec.bernoulli(p), 900 + trial, scale=1)
        used = set()
        for path in res.paths:
            assert path[0] == (0, 0)
            assert abs(path[-1][0]) + abs(path[-1][1]) == 8
            for a, b in zip(path, path[1:]):
                e = bond(a, b)
                assert e not in used  # pairwise edge-disjoint
                used.add(e)
                assert field.capacity_micro(e) == 1  # open bonds only
