"""Graded cotangent modules and Hodge numbers of affine cones."""
from .cotangent import ConeRing, NonIsolatedSingularity, t0, t1, t2
from .gradmod import PathDisagreement, ci_hilbert_series, hilbert_function
from .hodge import GeometryContext, HodgeDiamond, milnor_hodge, render_diamond, theorem_extract
from .kaehler import ExtComputer, ext_slice, hodge_from_ext
from .parser import ParseError, parse

__all__ = [
    "ConeRing", "NonIsolatedSingularity", "t0", "t1", "t2",
    "PathDisagreement", "ci_hilbert_series", "hilbert_function",
    "GeometryContext", "HodgeDiamond", "milnor_hodge", "render_diamond", "theorem_extract",
    "ExtComputer", "ext_slice", "hodge_from_ext",
    "ParseError", "parse",
]
__version__ = "0.1.0"
