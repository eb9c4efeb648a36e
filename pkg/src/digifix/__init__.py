"""Exact checkers for maps on finite digital metric spaces.

Digital images with c_u adjacency, exact metrics, pair properties such as
(weak) compatibility, fixed-point theorem verdicts and an exhaustive
counterexample auditor.
"""
from .image import (
    DigitalImage,
    InvalidInput,
    SelfMap,
    compose,
    cu_adjacent,
    discontinuities,
    discontinuity,
    fixed_points,
    is_connected,
    is_connected_subset,
    is_continuous,
    neighbors,
)
from .metrics import (
    Metric,
    distance,
    min_positive_distance,
    shrinkage_bound,
    truncated_limit_trace,
    verify_metric_axioms,
)
from .properties import (
    ContractionSpec,
    MapPair,
    check_properties,
    coincidence,
    contraction_check,
    is_commuting,
    is_compatible,
    is_compatible_type,
    is_weakly_compatible,
    satisfies_CLRT,
    satisfies_EA,
)
from .engine import common_fixed_points, jungck_iteration, no_onto_expansive, theorem_verdict, verify_shrinkage
from .instance import Instance, parse_instance, serialize_instance
from .scalar import ExactScalar
from .search import SweepSpace, audit, replay

__all__ = [
    "audit",
    "check_properties",
    "coincidence",
    "common_fixed_points",
    "compose",
    "contraction_check",
    "ContractionSpec",
    "cu_adjacent",
    "DigitalImage",
    "discontinuities",
    "discontinuity",
    "distance",
    "ExactScalar",
    "fixed_points",
    "Instance",
    "InvalidInput",
    "is_commuting",
    "is_compatible",
    "is_compatible_type",
    "is_connected",
    "is_connected_subset",
    "is_continuous",
    "is_weakly_compatible",
    "jungck_iteration",
    "MapPair",
    "Metric",
    "min_positive_distance",
    "neighbors",
    "no_onto_expansive",
    "parse_instance",
    "replay",
    "satisfies_CLRT",
    "satisfies_EA",
    "SelfMap",
    "serialize_instance",
    "shrinkage_bound",
    "SweepSpace",
    "theorem_verdict",
    "truncated_limit_trace",
    "verify_metric_axioms",
    "verify_shrinkage",
]

__version__ = "0.1.0"
