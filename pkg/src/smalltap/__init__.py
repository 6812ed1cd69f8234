"""Weighted tree augmentation: LP relaxations, exact oracles and the
level-decomposition approximation."""

from .decompose import (
    ApproxResult,
    Candidate,
    StarInstance,
    TransformedLink,
    approximate,
    build_level_candidate,
    candidate_cost_bound,
    copy_coefficient,
    ratio_bound,
    solve_level_candidate,
    transform_link,
    worst_case_costs,
)
from .exact import (
    MembershipResult,
    Solution,
    enumerate_minimal_solutions,
    is_feasible,
    solve_exact,
    solve_star_exact,
    tap_polytope_membership,
)
from .instance import (
    Link,
    LinkClass,
    LinkMapping,
    TapInstance,
    TreeIndex,
    classify,
    cov,
    covered_edges,
    is_leaf_to_leaf,
    lca,
    leaf_to_leaf,
    partition_by_lca_level,
    validate,
)
from .lp import (
    OddCut,
    OddLpResult,
    build_edge_lp,
    check_point_odd_feasible,
    is_extreme_point,
    odd_constraint,
    odd_cut,
    separate_odd,
    solve_edge_lp,
    solve_odd_lp,
    tight_rank,
)

__version__ = "0.1.0"
