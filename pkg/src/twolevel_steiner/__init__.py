"""Two-level rectilinear Steiner trees.

Partition the terminals into groups, connect each group by its own
rectilinear Steiner tree, and join the group trees by a top-level tree.
This package provides exact-rational geometry, fast approximation
strategies with proven factors, an exact solver for small instances, the
dimension-lifting reductions relating the two-level problem to ordinary
Steiner trees, and a CLI for batch runs and benchmarks.
"""

from .geometry import (
    Coord,
    EmbeddedTree,
    HananGrid,
    Point,
    Rect,
    bounding_box,
    coord,
    hanan_grid,
    l1_dist,
    nearest_point_on_tree,
    pt,
    tree_length,
    validate_tree,
)
from .lifting import (
    LiftedPoint,
    LiftedTree,
    flatten,
    lift_instance,
    lift_tree,
    lifted_l1,
    max_flow_min_cut,
    normalize_single_edges,
    project_to_two_level,
)
from .oracle import ExactSizeError, exact_rsmt, exact_two_level, u_bound
from .rsmt import SteinerSubroutine, approx_steiner, rectilinear_mst, steinerize
from .twolevel import (
    FactorSpec,
    Instance,
    Thresholds,
    TwoLevelTree,
    adjusted_connection_point,
    bbox_center_point,
    canonicalize,
    factor_f,
    is_complete,
    optimize_beta,
    refine_subtree,
    solve_adjusted,
    solve_bbox_center,
    solve_simple,
    solve_small_top,
    solve_with_connection_points,
    thresholds,
    top_level_bbox,
)

__version__ = "0.1.0"

__all__ = [
    "Coord",
    "EmbeddedTree",
    "ExactSizeError",
    "FactorSpec",
    "HananGrid",
    "Instance",
    "LiftedPoint",
    "LiftedTree",
    "Point",
    "Rect",
    "SteinerSubroutine",
    "Thresholds",
    "TwoLevelTree",
    "adjusted_connection_point",
    "approx_steiner",
    "bbox_center_point",
    "bounding_box",
    "canonicalize",
    "coord",
    "exact_rsmt",
    "exact_two_level",
    "factor_f",
    "flatten",
    "hanan_grid",
    "is_complete",
    "l1_dist",
    "lift_instance",
    "lift_tree",
    "lifted_l1",
    "max_flow_min_cut",
    "nearest_point_on_tree",
    "normalize_single_edges",
    "optimize_beta",
    "project_to_two_level",
    "pt",
    "rectilinear_mst",
    "refine_subtree",
    "solve_adjusted",
    "solve_bbox_center",
    "solve_simple",
    "solve_small_top",
    "solve_with_connection_points",
    "steinerize",
    "thresholds",
    "top_level_bbox",
    "tree_length",
    "u_bound",
    "validate_tree",
]
