"""Polyhedral convex functions and sets.

Convex functions are max-affine, ``f(x) = max_i (<a_i, x> + b_i)``, which is
finite everywhere.  Extended-valued polyhedral functions are only handled
through their epigraphs (see :func:`epi_to_value`).
"""

from __future__ import annotations

from contextvars import ContextVar
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import (
    ConditionsNotMet,
    DimensionMismatch,
    EmptySet,
    HasRays,
    PointNotInSet,
    SupportUnbounded,
)
from .exactgeom import (
    INF,
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    HPolyhedron,
    RatVec,
    VPolyhedron,
    as_rat,
    dedupe,
    inner,
    lp_max,
    recession_member,
    solve_standard,
    support_value,
    v_member,
)


# Fault-injection switch for the selftest; flips the vertex inequality below.
FLIP_NORMAL_CONE: ContextVar[bool] = ContextVar("FLIP_NORMAL_CONE", default=False)


@dataclass(frozen=True)
class MaxAffineFunction:
    pieces: tuple[tuple[RatVec, Fraction], ...]
    dim: int

    def __init__(self, pieces: Iterable, dim: int | None = None):
        ps = tuple((RatVec(a), as_rat(b)) for a, b in pieces)
        if not ps:
            raise ValueError("a max-affine function needs at least one piece")
        if dim is None:
            dim = ps[0][0].dim
        for a, _ in ps:
            if a.dim != dim:
                raise DimensionMismatch(f"slope {a} is not of dimension {dim}")
        object.__setattr__(self, "pieces", ps)
        object.__setattr__(self, "dim", dim)

    def __call__(self, x) -> Fraction:
        return evaluate(self, x)

    @property
    def is_sublinear(self) -> bool:
        """Sufficient test: every offset is zero (exact when no piece is dominated)."""
        return all(b == 0 for _, b in self.pieces)


def _point(f: MaxAffineFunction, x) -> RatVec:
    x = RatVec(x)
    if x.dim != f.dim:
        raise DimensionMismatch(f"point of dimension {x.dim} for a function on Q^{f.dim}")
    return x


def evaluate(f: MaxAffineFunction, x) -> Fraction:
    x = _point(f, x)
    return max(inner(a, x) + b for a, b in f.pieces)


def active_pieces(f: MaxAffineFunction, x) -> list[int]:
    x = _point(f, x)
    vals = [inner(a, x) + b for a, b in f.pieces]
    top = max(vals)
    return [i for i, v in enumerate(vals) if v == top]


def subdifferential(f: MaxAffineFunction, x) -> VPolyhedron:
    """Convex hull of the slopes of every piece active at ``x``."""
    idx = active_pieces(f, x)
    return VPolyhedron(dedupe(f.pieces[i][0] for i in idx), (), f.dim)


def epigraph(f: MaxAffineFunction) -> HPolyhedron:
    """Rows ``<(a_i, -1), (x, lam)> <= -b_i`` in ``Q^(dim+1)``."""
    return HPolyhedron(((a.extend(-1), -b) for a, b in f.pieces), f.dim + 1)


def normal_cone_member(C: VPolyhedron, x, xstar) -> bool:
    """Is ``x*`` in ``N_C(x)``?  Always False when ``x`` lies outside ``C``."""
    x, xstar = RatVec(x), RatVec(xstar)
    if C.is_empty:
        raise EmptySet("normal cone of the empty set")
    if x.dim != C.dim or xstar.dim != C.dim:
        raise DimensionMismatch("point, dual vector and set dimensions differ")
    if not v_member(x, C):
        return False
    if FLIP_NORMAL_CONE.get():
        return all(inner(v - x, xstar) >= 0 for v in C.vertices)
    return (all(inner(v - x, xstar) <= 0 for v in C.vertices)
            and all(inner(r, xstar) <= 0 for r in C.rays))


def normal_cone_generators(C: HPolyhedron, x) -> list[RatVec]:
    """Normals of the rows tight at ``x``; their cone is ``N_C(x)``."""
    x = RatVec(x)
    if x.dim != C.dim:
        raise DimensionMismatch(f"point of dimension {x.dim} vs set of dimension {C.dim}")
    if x not in C:
        raise PointNotInSet(f"{x} violates a row of the set")
    return list(dedupe(C.rows[j][0] for j in C.tight_rows(x)))


def support_face(C: VPolyhedron, xstar) -> VPolyhedron:
    """Face of ``C`` maximizing ``<., x*>``; equals the subdifferential of the support function."""
    sv = support_value(C, xstar)
    if sv == INF:
        raise SupportUnbounded(f"support value at {RatVec(xstar)} is +inf")
    xstar = RatVec(xstar)
    verts = [v for v in C.vertices if inner(v, xstar) == sv]
    rays = [r for r in C.rays if inner(r, xstar) == 0]
    return VPolyhedron(verts, rays, C.dim)


def sublinear_from_polytope(D: VPolyhedron) -> MaxAffineFunction:
    """``s(x) = max_{d in vertices(D)} <d, x>``, the support function of ``D``."""
    if D.is_empty:
        raise EmptySet("support function of the empty set")
    if D.rays:
        raise HasRays("a set with rays has an extended-valued support function")
    return MaxAffineFunction(((d, 0) for d in dedupe(D.vertices)), D.dim)


@dataclass(frozen=True)
class EpiConditionsReport:
    cond_i: bool
    cond_ii: bool
    cond_iii: bool
    witness_i: RatVec | None = None
    witness_ii: RatVec | None = None
    witness_iii: RatVec | None = None

    @property
    def all_hold(self) -> bool:
        return self.cond_i and self.cond_ii and self.cond_iii


def _lift_direction(dim: int) -> RatVec:
    return RatVec.unit(dim, dim - 1)


def epigraph_conditions(C) -> EpiConditionsReport:
    """Decide the three conditions characterising epigraphs of l.s.c. proper convex functions.

    i) nonempty (convexity and closedness are automatic for finitely
    generated and finitely constrained sets), ii) some ``(x*, -1)`` in the
    barrier cone, iii) ``(0, 1)`` in the recession cone.
    """
    if C.dim < 2:
        raise DimensionMismatch("epigraph candidates live in X x R with dim X >= 1")
    up = _lift_direction(C.dim)
    n = C.dim - 1

    if isinstance(C, VPolyhedron):
        if C.is_empty:
            return EpiConditionsReport(False, False, False)
        w_i = C.vertices[0]
        # (x*, -1) in barr(C)  <=>  <r_x, x*> <= r_lam for every ray
        if all(r[-1] >= 0 for r in C.rays):
            cond_ii, w_ii = True, RatVec.zeros(n).extend(-1)
        else:
            H = HPolyhedron(((r.head(), r[-1]) for r in C.rays), n)
            out = lp_max(RatVec.zeros(n), H)
            cond_ii = out.status == OPTIMAL
            w_ii = out.witness.extend(-1) if cond_ii else None
        cond_iii = recession_member(up, C)
        return EpiConditionsReport(True, cond_ii, cond_iii, w_i, w_ii, up if cond_iii else None)

    feas = lp_max(RatVec.zeros(C.dim), C)
    if feas.status == INFEASIBLE:
        return EpiConditionsReport(False, False, False)
    w_i = feas.witness
    # barr of a nonempty H-polyhedron is the cone of its row normals:
    # look for lam >= 0 with sum lam_j alpha_j = -1 (alpha_j the last coordinates)
    rows = C.rows
    w_ii = None
    if rows:
        status, _, lam, _ = solve_standard([[a[-1] for a, _ in rows]], [-1], [0] * len(rows))
        if status == OPTIMAL:
            xs = RatVec.zeros(n)
            for l, (a, _) in zip(lam, rows):
                xs = xs + a.head() * l
            w_ii = xs.extend(-1)
            assert lp_max(w_ii, C).status == OPTIMAL
    cond_iii = recession_member(up, C)
    return EpiConditionsReport(True, w_ii is not None, cond_iii, w_i, w_ii, up if cond_iii else None)


def epi_to_value(C: VPolyhedron, x):
    """``inf {lam : (x, lam) in C}``; :data:`INF` when no such ``lam`` exists."""
    x = RatVec(x)
    if x.dim != C.dim - 1:
        raise DimensionMismatch(f"point of dimension {x.dim} for an epigraph in Q^{C.dim}")
    report = epigraph_conditions(C)
    if not report.all_hold:
        raise ConditionsNotMet(report)
    gens = list(C.vertices) + list(C.rays)
    nv = len(C.vertices)
    A = [[g[k] for g in gens] for k in range(x.dim)]
    A.append([Fraction(1)] * nv + [Fraction(0)] * len(C.rays))
    cost = [-g[-1] for g in gens]
    status, value, _, _ = solve_standard(A, list(x) + [Fraction(1)], cost)
    if status == INFEASIBLE:
        return INF
    if status == UNBOUNDED:  # excluded by condition ii
        raise AssertionError("epigraph unbounded below despite a barrier witness")
    return -value


@dataclass(frozen=True)
class DualityReport:
    checked: int
    discrepancies: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.discrepancies


def verify_conjugate_duality(C: VPolyhedron, sample_xstars) -> DualityReport:
    """Check that the support-function subdifferential inverts the normal cone.

    For every sampled ``x*`` and vertex ``z`` of the maximizing face,
    ``x*`` must lie in ``N_C(z)``; conversely for every vertex ``z`` of ``C``
    with ``x* in N_C(z)``, ``z`` must belong to the maximizing face.
    """
    if C.is_empty:
        raise EmptySet("duality check on the empty set")
    if not C.is_bounded:
        raise ValueError("verify_conjugate_duality needs a bounded set")
    bad = []
    checked = 0
    for xs in sample_xstars:
        xs = RatVec(xs)
        face = support_face(C, xs)
        for z in face.vertices:
            checked += 1
            if not normal_cone_member(C, z, xs):
                bad.append(("face-not-normal", z, xs))
        for z in dedupe(C.vertices):
            checked += 1
            if normal_cone_member(C, z, xs) != v_member(z, face):
                bad.append(("normal-not-face", z, xs))
    return DualityReport(checked, tuple(bad))
