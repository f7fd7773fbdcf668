"""Virtual classes and representation zeta functions for triangular groups."""
from .poly import MultiPoly, GenusPoly, ZetaExpr, LaurentQ, parse
from .errors import AlgorithmFailure, BranchFailure, ResourceLimit, SizeLimit

__version__ = "0.1.0"

__all__ = [
    "MultiPoly", "GenusPoly", "ZetaExpr", "LaurentQ", "parse",
    "AlgorithmFailure", "BranchFailure", "ResourceLimit", "SizeLimit",
]
