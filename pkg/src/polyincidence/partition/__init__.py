"""Polynomial partitioning: ham-sandwich bisection, sign-vector cells, component counts."""
from .cells import (BOUNDARY, ON_BOUNDARY, Crossing, Partition, assign_cells, cell_decompose,
                    cells_met_by_flat)
from .components import NonGenericShift, count_components_complement, critical_point_count
from .hamsandwich import (BisectionCertificate, BisectionNotFound, SetCount, certify,
                          ham_sandwich_polynomial, min_degree_for)

__all__ = [
    "BOUNDARY", "ON_BOUNDARY", "BisectionCertificate", "BisectionNotFound", "Crossing",
    "NonGenericShift", "Partition", "SetCount", "assign_cells", "cell_decompose", "cells_met_by_flat",
    "certify", "count_components_complement", "critical_point_count", "ham_sandwich_polynomial",
    "min_degree_for",
]
