"""Exact seminorm computations on finite normed chain complexes."""

from .complexes import (
    ComplexError,
    DualCone,
    FiniteChainComplex,
    MappingCone,
    PairComplex,
    format_rational,
    parse_rational,
    simplicial_complex,
)
from .lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LPProblem, LPResult, MalformedProblem, lp_solve
from .norms import (
    INFINITY,
    NOT_GUARANTEED,
    SUCCESS,
    ConeClass,
    HomClass,
    NegativeTheta,
    NonpositiveEpsilon,
    NotAConeCycle,
    NotACycle,
    beta_map,
    class_from_dict,
    cone_class_from_dict,
    cone_seminorm,
    duality_max,
    homology_seminorm,
    is_cone_boundary,
    theta_norm,
    thurston_representative,
)
