"""Exact computation and verification of ordinary-line bounds for point sets in C^d."""

__version__ = "0.1.0"

from .exactgeom import (IncidenceStructure, PointConfig, affine_dim, collinear,
                        enumerate_lines, max_points_in_flat)
from .configgen import fermat, fermat_with_apex, hesse, load, parse, random_generic, save, serialize
from .depmat import full_dep_matrix, line_dep_matrix
from .latin import skew_diagonal_square, triple_system
from .scalerank import l2_scale, property_s, rank_lower_bound, sinkhorn
from .verify import CHECKS, VerdictReport, run_prune

__all__ = [
    "IncidenceStructure", "PointConfig", "affine_dim", "collinear", "enumerate_lines", "max_points_in_flat",
    "fermat", "fermat_with_apex", "hesse", "load", "parse", "random_generic", "save", "serialize",
    "full_dep_matrix", "line_dep_matrix", "skew_diagonal_square", "triple_system",
    "l2_scale", "property_s", "rank_lower_bound", "sinkhorn",
    "CHECKS", "VerdictReport", "run_prune",
]
