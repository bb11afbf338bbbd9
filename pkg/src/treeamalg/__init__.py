"""Finite truncations of tree amalgamations of locally finite graphs.

Build factor balls, glue them over a truncated bipartite tree, contract the
gluing edges, and check metric, boundary and quasi-isometry behaviour at
desk scale with every claim confined to a certified window.
"""

__version__ = "0.1.0"

from .amalgam import (AmalgamBundle, AmalgamationSpec, SwappedMap,
                      TruncatedTree, adhesion_metrics, build, build_plus,
                      build_swapped_map, builtin_spec,
                      check_pair_preservation, contract,
                      identification_size, is_trivial, validate_spec)
from .ball import CertifiedDistance, FiniteBall, Path
from .boundary import (BoundaryProfile, EndProfile, RayClass,
                       boundary_profile, classify_ray, components_vs_ends,
                       disconnectedness_score, end_profile)
from .errors import (CapacityError, CertificationError, GenerationError,
                     PartialResultError, PreconditionError, SchemaError,
                     TreeAmalgError, ValidationError)
from .generators import (Presentation, TreeSpec, builtin_presentation,
                         cayley_ball, complete_graph, cycle_graph,
                         finite_graph, free_product_cyclic, grid_ball,
                         resolve_factor, semiregular_tree)
from .hyperbolic import (DeltaReport, ball_for, delta_four_point_x2,
                         delta_growth, delta_thin, gromov_product_x2,
                         half_str)
from .qi import (QIFit, check_geodesic_preservation,
                 check_plus_vs_contracted, is_quasi_geodesic, qi_constants)
from .suites import SUITE_NAMES, run_suite

__all__ = [
    "AmalgamBundle", "AmalgamationSpec", "SwappedMap", "TruncatedTree",
    "adhesion_metrics", "build", "build_plus", "build_swapped_map",
    "builtin_spec", "check_pair_preservation", "contract",
    "identification_size", "is_trivial", "validate_spec",
    "CertifiedDistance", "FiniteBall", "Path",
    "BoundaryProfile", "EndProfile", "RayClass", "boundary_profile",
    "classify_ray", "components_vs_ends", "disconnectedness_score",
    "end_profile",
    "CapacityError", "CertificationError", "GenerationError",
    "PartialResultError", "PreconditionError", "SchemaError",
    "TreeAmalgError", "ValidationError",
    "Presentation", "TreeSpec", "builtin_presentation", "cayley_ball",
    "complete_graph", "cycle_graph", "finite_graph", "free_product_cyclic",
    "grid_ball", "resolve_factor", "semiregular_tree",
    "DeltaReport", "ball_for", "delta_four_point_x2", "delta_growth",
    "delta_thin", "gromov_product_x2", "half_str",
    "QIFit", "check_geodesic_preservation", "check_plus_vs_contracted",
    "is_quasi_geodesic", "qi_constants",
    "SUITE_NAMES", "run_suite",
    "__version__",
]
