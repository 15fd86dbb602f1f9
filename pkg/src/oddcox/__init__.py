"""Finite-index reflection subgroups of odd-angled Coxeter groups."""

__version__ = "0.1.0"

from .diagrams import INF, CoxeterMatrix, divisibility_diagram, parse_coxeter_matrix  # noqa: E402
from .words import CoxeterGroup  # noqa: E402
from .criterion import classify  # noqa: E402
from .constructor import construct  # noqa: E402

__all__ = [
    "INF",
    "CoxeterGroup",
    "CoxeterMatrix",
    "classify",
    "construct",
    "divisibility_diagram",
    "parse_coxeter_matrix",
]
