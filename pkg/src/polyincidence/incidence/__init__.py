"""Incidence counting, trivial bounds, axiom checks and rich points."""
from .axioms import (AXIOMS, FAIL, NOT_CHECKED, PASS, AxiomReport, AxiomResult, check_axioms,
                     orientation_classes, radial_sign_class)
from .config import Config, IncidenceSet
from .counting import incidences_bruteforce, incidences_partitioned, rich_points, trivial_bounds

__all__ = [
    "AXIOMS", "FAIL", "NOT_CHECKED", "PASS", "AxiomReport", "AxiomResult", "Config", "IncidenceSet",
    "check_axioms", "incidences_bruteforce", "incidences_partitioned", "orientation_classes",
    "radial_sign_class", "rich_points", "trivial_bounds",
]
