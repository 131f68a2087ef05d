"""Exact symbolic engine for birational transformations of P^n.

Everything is exact: maps are tuples of multivariate polynomials or
rational functions in canonical form, birationality is witnessed by
attached inverse certificates, and randomized checks run over large
prime fields with one-sided error only.
"""

from .deform import (
    NormalSplit,
    deformation_family,
    normal_derivative,
    normal_split,
)
from .errors import CremonaError
from .fields import QQ, PrimeField
from .jonquieres import (
    JonqElt,
    Mat2K,
    det_class,
    embed_base,
    embed_fiber,
    extract,
    in_det_kernel,
    is_in_jonquieres,
)
from .maps import (
    AffineMap,
    ProjMap,
    ProjPoint,
    affine_to_proj,
    attach_inverse,
    compose,
    compose_affine,
    invert_affine,
    invert_proj,
    proj_to_affine,
    restrict_to_h0,
    standard_involution,
    standard_involution_affine,
    tangent_action,
)
from .mpoly import MPoly, mpoly_gcd, squarefree_decompose
from .oracle import (
    OracleConfig,
    dominance_check,
    inverse_check,
    probably_equal,
)
from .paths import (
    PathFamily,
    PathReport,
    connect_to_identity,
    jonq_path,
    path_from_dict,
    pgl2k_path,
    pgl_path,
    verify_path,
)
from .ratfn import RatFn, SquareClass, square_class_of
from .simplicity import (
    WordExpr,
    commutator_to_J0,
    fixing_element,
    noether_check,
    sigma_descent,
    simplicity_pipeline,
    standardize_pair,
)
from .textio import parse_map, parse_point

__all__ = [
    "AffineMap",
    "CremonaError",
    "JonqElt",
    "MPoly",
    "Mat2K",
    "NormalSplit",
    "OracleConfig",
    "PathFamily",
    "PathReport",
    "PrimeField",
    "ProjMap",
    "ProjPoint",
    "QQ",
    "RatFn",
    "SquareClass",
    "WordExpr",
    "affine_to_proj",
    "attach_inverse",
    "commutator_to_J0",
    "compose",
    "compose_affine",
    "connect_to_identity",
    "deformation_family",
    "det_class",
    "dominance_check",
    "embed_base",
    "embed_fiber",
    "extract",
    "fixing_element",
    "in_det_kernel",
    "inverse_check",
    "invert_affine",
    "invert_proj",
    "is_in_jonquieres",
    "jonq_path",
    "mpoly_gcd",
    "noether_check",
    "normal_derivative",
    "normal_split",
    "parse_map",
    "parse_point",
    "path_from_dict",
    "pgl2k_path",
    "pgl_path",
    "probably_equal",
    "proj_to_affine",
    "restrict_to_h0",
    "sigma_descent",
    "simplicity_pipeline",
    "square_class_of",
    "squarefree_decompose",
    "standard_involution",
    "standard_involution_affine",
    "standardize_pair",
    "tangent_action",
    "verify_path",
]
