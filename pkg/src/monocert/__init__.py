"""Exact-arithmetic checks for monotone operators, normal cones and subdifferentials."""

from .convexpoly import (
    EpiConditionsReport,
    MaxAffineFunction,
    epi_to_value,
    epigraph,
    epigraph_conditions,
    evaluate,
    normal_cone_generators,
    normal_cone_member,
    sublinear_from_polytope,
    subdifferential,
    support_face,
    verify_conjugate_duality,
)
from .exactgeom import (
    INF,
    HPolyhedron,
    LpOutcome,
    RatVec,
    VPolyhedron,
    barrier_member,
    cone_member,
    inner,
    lp_max,
    project_polytope,
    recession_member,
    support_value,
    vec,
)
from .operators import (
    CycleViolation,
    FiniteOperator,
    MonotonicityViolation,
    domain,
    invert,
    is_cyclically_monotone,
    is_monotone,
    range_,
    rockafellar_potential,
    values_at,
)

__version__ = "0.1.0"
