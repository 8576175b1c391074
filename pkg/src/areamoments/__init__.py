"""Exact area statistics of lattice paths and column-convex polygons,
their Brownian-area moment limits, and a kernel-method numeric toolkit."""

from .converge import (
    ConvergenceReport,
    RegimeDispatch,
    ReportRow,
    default_signed_orders,
    factorial_from_raw,
    limit_report,
    load_tolerances,
    raw_from_factorial,
    regime_dispatch,
    signed_report,
    stirling1_signed_row,
    stirling2_row,
)
from .enumeration import (
    AreaDistribution,
    BridgeSignedDistribution,
    MomentTable,
    PathClass,
    SignedMomentTable,
    bridge_distribution,
    bridge_series_from_excursions,
    distributions_through,
    exact_distribution,
    meander_altitude_series,
    moment_dp,
    signed_moment_dp,
)
from .kernel import (
    AssumptionReport,
    BranchSet,
    CatalyticSolution,
    KernelProfile,
    PuiseuxReport,
    Regime,
    assumption_report,
    branches_at,
    solve_meander_gf,
    structural_constants,
    truncation_bound,
    verify_puiseux,
)
from .limits import (
    ExactRadical,
    RecursionTable,
    c_table,
    d_sequence,
    d_signed_table,
    gamma_half,
    k_sequence,
    l_abs_table,
    l_signed_table,
    limiting_moment,
    q_joint_table,
    q_sequence,
)
from .polyomino import (
    CCKernelData,
    CCMomentTable,
    cc_area_moments,
    cc_brute_oracle,
    cc_enumerate,
    cc_functional_equation,
    cc_kernel_data,
    cc_structural_constants,
)
from .steps import (
    StepCharacteristics,
    StepSet,
    characteristics,
    eval_step_polynomial,
    parse_step_set,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
