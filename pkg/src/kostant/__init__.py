"""Exact counts and entropy/capacity bounds for the type-A Kostant partition function."""

from .entropy_bounds import BoundReport, correction_log, flow_entropy, h, lower_bound_at, upper_bound_at
from .errors import KostantError, NoConvergence, ResourceLimit
from .exact_count import count_brute, count_exact
from .flow_core import (
    FlowMatrix,
    NamedFamily,
    NetflowVector,
    family,
    make_flow,
    make_netflow,
    parse_netflow,
)
from .lidskii import lidskii_bounds, lidskii_count
from .scaling_opt import capacity_log, maximize_entropy
from .vertex_average import average_cry, average_positive, enumerate_vertices, midpoint_2rho

__all__ = [
    "BoundReport", "FlowMatrix", "KostantError", "NamedFamily", "NetflowVector",
    "NoConvergence", "ResourceLimit", "average_cry", "average_positive", "capacity_log",
    "correction_log", "count_brute", "count_exact", "enumerate_vertices", "family",
    "flow_entropy", "h", "lidskii_bounds", "lidskii_count", "lower_bound_at", "make_flow",
    "make_netflow", "maximize_entropy", "midpoint_2rho", "parse_netflow", "upper_bound_at",
]
