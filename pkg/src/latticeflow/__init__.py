"""Max flow / min cut to infinity on randomly capacitated 2D lattices."""

__version__ = "0.1.0"

from .backend import BACKEND
from .capacity import (
    MICRO_SCALE,
    CapacityField,
    DistributionSpec,
    derive_seed,
    mass_at_zero,
    parse_distribution,
    validate_for_theorems,
)
from .cutflow import (
    BudgetExceeded,
    Cutset,
    DualCycle,
    FlowAssignment,
    MaxFlowResult,
    MengerResult,
    NotACycle,
    SourceTouchesBoundary,
    brute_force_min_cycle,
    cut_separates,
    cutset_to_cycle,
    flow_value,
    menger_disjoint_paths,
    mincut_infinity,
    truncated_maxflow,
    verify_flow,
)
from .experiments import (
    ConvergenceRecord,
    DisjointRecord,
    RunConfig,
    TailSummary,
    run_convergence,
    run_disjoint,
    run_tail,
)
from .fpp import (
    Box,
    MissingDirection,
    MuEstimate,
    MuTable,
    PassageLattice,
    Unreachable,
    cylinder_crossing_time,
    distance,
    estimate_mu,
    estimate_mu_table,
    mu_eval,
)
from .geometry import (
    ConvexPolygon,
    IValue,
    contains_origin_interior,
    i_functional,
    parse_polygon,
    regular_polygon,
    scale,
    square,
)
from .lattice import (
    Bond,
    DualBond,
    DualSite,
    EmptyRegion,
    Site,
    SiteSet,
    bond,
    dual_bond,
    int_of_point,
    neighbors,
    s_of_bond,
    s_of_dual_bond,
    sites_in_scaled_polygon,
)
