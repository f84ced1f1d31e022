"""Exact verification tools for bicrossed-product quantum groups."""
from .padic import PAdicNumber, LocallyConstantFunction, haar_integral
from .matched import MatchedPair, builtin_pair, check_matched
from .unitary import build_W, pentagon_check, regularity_report
from .pentagon import PentagonalMap, builtin_map, pentagon_identity_check

__all__ = [
    "PAdicNumber", "LocallyConstantFunction", "haar_integral",
    "MatchedPair", "builtin_pair", "check_matched",
    "build_W", "pentagon_check", "regularity_report",
    "PentagonalMap", "builtin_map", "pentagon_identity_check",
]
__version__ = "0.1.0"
