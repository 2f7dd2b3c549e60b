"""Seeded random instances with bounded-denominator rational data."""

from __future__ import annotations

import random
from fractions import Fraction

from .convexpoly import MaxAffineFunction, active_pieces, support_face
from .exactgeom import RatVec, VPolyhedron, dedupe, inner
from .operators import FiniteOperator
from .theorems import rand_rat

MAX_DEN = 16


def rand_vec(rng: random.Random, dim: int, lo: int = -3, hi: int = 3, max_den: int = MAX_DEN) -> RatVec:
    return RatVec(rand_rat(rng, lo, hi, max_den) for _ in range(dim))


def rand_int_vec(rng: random.Random, dim: int, lo: int = -3, hi: int = 3) -> RatVec:
    return RatVec(rng.randint(lo, hi) for _ in range(dim))


def random_max_affine(rng: random.Random, dim: int | None = None, pieces: int | None = None) -> MaxAffineFunction:
    """Max-affine function on ``Q^dim`` (dim <= 3, <= 6 pieces).

    Offsets are drawn from a small set so that several pieces tie at
    integer points more often than chance.
    """
    dim = dim or rng.randint(1, 3)
    pieces = pieces or rng.randint(1, 6)
    ps = []
    for _ in range(pieces):
        a = rand_vec(rng, dim) if rng.random() < 0.6 else rand_int_vec(rng, dim)
        b = Fraction(rng.randint(-2, 2)) if rng.random() < 0.5 else rand_rat(rng, -2, 2)
        ps.append((a, b))
    return MaxAffineFunction(ps, dim)


def sample_points(rng: random.Random, dim: int, count: int) -> list[RatVec]:
    """Mix of integer points (likely kinks) and general rationals."""
    pts = [RatVec.zeros(dim)]
    while len(pts) < count:
        pts.append(rand_int_vec(rng, dim, -2, 2) if rng.random() < 0.4 else rand_vec(rng, dim))
    return pts[:count]


def subdifferential_operator(rng: random.Random, f: MaxAffineFunction, points: int = 12) -> FiniteOperator:
    """Graph samples of ``df``: active slopes and some of their midpoints."""
    pairs = []
    for x in sample_points(rng, f.dim, points):
        slopes = [f.pieces[i][0] for i in active_pieces(f, x)]
        for a in slopes:
            pairs.append((x, a))
        if len(slopes) > 1:
            a, b = rng.sample(slopes, 2)
            pairs.append((x, (a + b) / 2))
    return FiniteOperator(pairs, f.dim)


def random_polytope(rng: random.Random, dim: int | None = None, vertices: int | None = None) -> VPolyhedron:
    dim = dim or rng.randint(1, 3)
    count = vertices or rng.randint(1, 6)
    return VPolyhedron([rand_vec(rng, dim) for _ in range(count)], (), dim)


def monotone_operator_with_zero(rng: random.Random, dim: int | None = None,
                                points: int | None = None) -> FiniteOperator:
    """Random monotone operator with ``0`` in every value set.

    Each nonzero value ``x*`` at ``x`` satisfies ``<y - x, x*> <= 0`` for all
    sampled ``y``, which is exactly what monotonicity against the zero values
    demands.  Nonzero values come from random directions maximised at ``x``.
    """
    dim = dim or rng.randint(1, 2)
    count = points or rng.randint(1, 6)
    xs = list(dedupe(rand_vec(rng, dim) for _ in range(count)))
    zero = RatVec.zeros(dim)
    pairs = [(x, zero) for x in xs]
    for _ in range(rng.randint(1, 4)):
        u = rand_int_vec(rng, dim)
        if u.is_zero():
            continue
        top = max(inner(x, u) for x in xs)
        for x in xs:
            if inner(x, u) == top:
                pairs.append((x, u * rng.randint(1, 3)))
    return FiniteOperator(pairs, dim)


def support_operator(rng: random.Random, D: VPolyhedron, points: int = 8) -> FiniteOperator:
    """Samples of ``d sigma_D``; ``T(0)`` holds every vertex of ``D``."""
    zero = RatVec.zeros(D.dim)
    pairs = [(zero, v) for v in D.vertices]
    for _ in range(points):
        x = rand_int_vec(rng, D.dim, -2, 2) if rng.random() < 0.3 else rand_vec(rng, D.dim)
        for v in support_face(D, x).vertices:
            pairs.append((x, v))
    return FiniteOperator(pairs, D.dim)


def random_epigraph_vrep(rng: random.Random, xdim: int | None = None):
    """A V-rep epigraph in ``Q^(xdim+1)`` together with a known barrier slope.

    Extra rays ``(r_x, r_lam)`` have ``<h, r_x> > 0`` for a fixed ``h``, so
    ``(0, 1)`` is never a combination of them, and ``r_lam >= <r_x, s>`` so
    ``(s, -1)`` stays in the barrier cone.
    """
    xdim = xdim or rng.randint(1, 2)
    dim = xdim + 1
    verts = [rand_vec(rng, dim) for _ in range(rng.randint(1, 4))]
    h = rand_int_vec(rng, xdim, 1, 2)
    s = rand_vec(rng, xdim, -1, 1, 4)
    rays = [RatVec.unit(dim, xdim)]
    for _ in range(rng.randint(0, 3)):
        rx = rand_vec(rng, xdim)
        if inner(h, rx) <= 0:
            rx = rx - h * (inner(h, rx) / inner(h, h)) + h
        rays.append(rx.extend(inner(rx, s) + rand_rat(rng, 0, 2, 4)))
    return VPolyhedron(verts, rays, dim), s
