"""Exact rational linear algebra, linear programming and polyhedral primitives.

Everything here works over :class:`fractions.Fraction`; there are no
tolerances.  Polyhedra come in two flavours:

* :class:`VPolyhedron` -- ``conv(vertices) + cone(rays)``
* :class:`HPolyhedron` -- ``{x : <normal_j, x> <= offset_j for all j}``

V-rep sets are never converted to H-rep.  Queries against them are either
finite definitional checks or a single LP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DimensionMismatch, EmptySet, UnboundedSet

INF = math.inf

Rat = Fraction


def as_rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: silently turning ``0.1`` into a 55-bit dyadic is
    never what the caller meant.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_rat(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class RatVec(tuple):
    """Immutable exact vector in Q^n.

    ``+`` and ``-`` are elementwise (not tuple concatenation); use
    :meth:`extend` to append coordinates.
    """

    __slots__ = ()

    def __new__(cls, coords: Iterable = ()):
        return super().__new__(cls, tuple(as_rat(c) for c in coords))

    @classmethod
    def zeros(cls, dim: int) -> "RatVec":
        return cls([0] * dim)

    @classmethod
    def unit(cls, dim: int, k: int, value=1) -> "RatVec":
        coords = [0] * dim
        coords[k] = value
        return cls(coords)

    @property
    def dim(self) -> int:
        return len(self)

    def _check(self, other) -> None:
        if len(other) != len(self):
            raise DimensionMismatch(f"dimensions {len(self)} and {len(other)} differ")

    def __add__(self, other):
        self._check(other)
        return RatVec(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        self._check(other)
        return RatVec(a - b for a, b in zip(self, other))

    def __neg__(self):
        return RatVec(-a for a in self)

    def __mul__(self, scalar):
        s = as_rat(scalar)
        return RatVec(a * s for a in self)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        s = as_rat(scalar)
        return RatVec(a / s for a in self)

    def extend(self, *values) -> "RatVec":
        return RatVec(tuple(self) + tuple(as_rat(v) for v in values))

    def head(self) -> "RatVec":
        """All coordinates but the last (the X part of a point of X x R)."""
        return RatVec(self[:-1])

    def is_zero(self) -> bool:
        return all(a == 0 for a in self)

    def __repr__(self) -> str:
        return "RatVec(" + ", ".join(format_rat(a) for a in self) + ")"

    def __str__(self) -> str:
        return "(" + ", ".join(format_rat(a) for a in self) + ")"


def vec(*coords) -> RatVec:
    return RatVec(coords)


def inner(x: Sequence, xstar: Sequence) -> Fraction:
    """Duality pairing <x, x*> on Q^n, exact."""
    if len(x) != len(xstar):
        raise DimensionMismatch(f"dimensions {len(x)} and {len(xstar)} differ")
    return sum((a * b for a, b in zip(x, xstar)), Fraction(0))


def dedupe(points: Iterable[RatVec]) -> tuple[RatVec, ...]:
    """Drop repeated vectors, keeping first occurrences in order."""
    return tuple(dict.fromkeys(RatVec(p) for p in points))


@dataclass(frozen=True)
class VPolyhedron:
    """``conv(vertices) + cone(rays)``; generators may be redundant."""

    vertices: tuple[RatVec, ...]
    rays: tuple[RatVec, ...]
    dim: int

    def __init__(self, vertices=(), rays=(), dim: int | None = None):
        verts = tuple(RatVec(v) for v in vertices)
        rs = tuple(RatVec(r) for r in rays)
        if dim is None:
            members = verts + rs
            if not members:
                raise ValueError("dim is required when no generators are given")
            dim = members[0].dim
        for g in verts + rs:
            if g.dim != dim:
                raise DimensionMismatch(f"generator {g} is not of dimension {dim}")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "rays", rs)
        object.__setattr__(self, "dim", dim)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def is_bounded(self) -> bool:
        return all(r.is_zero() for r in self.rays)

    def __contains__(self, x) -> bool:
        return v_member(RatVec(x), self)


@dataclass(frozen=True)
class HPolyhedron:
    """``{x : <normal_j, x> <= offset_j}``; no rows means the whole space."""

    rows: tuple[tuple[RatVec, Fraction], ...]
    dim: int

    def __init__(self, rows=(), dim: int | None = None):
        rs = tuple((RatVec(a), as_rat(b)) for a, b in rows)
        if dim is None:
            if not rs:
                raise ValueError("dim is required for an H-polyhedron without rows")
            dim = rs[0][0].dim
        for a, _ in rs:
            if a.dim != dim:
                raise DimensionMismatch(f"row normal {a} is not of dimension {dim}")
        object.__setattr__(self, "rows", rs)
        object.__setattr__(self, "dim", dim)

    def __contains__(self, x) -> bool:
        x = RatVec(x)
        if x.dim != self.dim:
            raise DimensionMismatch(f"point of dimension {x.dim} vs set of dimension {self.dim}")
        return all(inner(a, x) <= b for a, b in self.rows)

    def tight_rows(self, x) -> list[int]:
        return [j for j, (a, b) in enumerate(self.rows) if inner(a, x) == b]


OPTIMAL = "Optimal"
UNBOUNDED = "Unbounded"
INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class LpOutcome:
    status: str
    value: Fraction | None = None
    witness: RatVec | None = None


# ---------------------------------------------------------------------------
# dense exact linear algebra


def rref(matrix: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(map(Fraction, row)) for row in matrix]
    pivots: list[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        m[r] = [v / piv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[RatVec]:
    """Basis of ``{d : <row, d> = 0 for every row}``."""
    if not rows:
        return [RatVec.unit(ncols, k) for k in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        d = [Fraction(0)] * ncols
        d[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            d[pc] = -red[i][fc]
        basis.append(RatVec(d))
    return basis


def solve_square(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Unique solution of a square system, or None if singular."""
    n = len(matrix)
    aug = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return RatVec(red[i][n] for i in range(n))


# ---------------------------------------------------------------------------
# simplex over Fractions, Bland's rule


def _pivot(rows, obj, basis, r, c):
    piv = rows[r][c]
    rows[r] = [v / piv for v in rows[r]]
    pr = rows[r]
    for i, row in enumerate(rows):
        if i != r and row[c] != 0:
            f = row[c]
            rows[i] = [a - f * b for a, b in zip(row, pr)]
    if obj[c] != 0:
        f = obj[c]
        obj[:] = [a - f * b for a, b in zip(obj, pr)]
    basis[r] = c


def _run_simplex(rows, obj, basis, allowed):
    """Maximize with reduced-cost row ``obj`` (last entry is -value).

    Returns None at optimum or the entering column proving unboundedness.
    """
    while True:
        enter = next((j for j in allowed if obj[j] > 0), None)
        if enter is None:
            return None
        best = None
        for i, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return enter
        _pivot(rows, obj, basis, best[1], enter)


def solve_standard(A, b, c):
    """Maximize ``c.y`` subject to ``A y = b``, ``y >= 0``.

    Returns ``(status, value, y, ray)``; ``ray`` is a nonnegative direction
    with ``A ray = 0`` and ``c.ray > 0`` when unbounded.
    """
    m, n = len(A), len(c)
    c = [Fraction(v) for v in c]
    rows = []
    for i in range(m):
        r = [Fraction(v) for v in A[i]]
        bi = Fraction(b[i])
        if bi < 0:
            r = [-v for v in r]
            bi = -bi
        rows.append(r + [Fraction(int(k == i)) for k in range(m)] + [bi])
    basis = [n + i for i in range(m)]

    # phase 1: maximize -sum(artificials); priced out against the initial basis
    obj = [Fraction(0)] * (n + m + 1)
    for row in rows:
        for j in range(n):
            obj[j] += row[j]
        obj[-1] += row[-1]
    _run_simplex(rows, obj, basis, range(n))
    if obj[-1] != 0:
        return INFEASIBLE, None, None, None

    keep = []
    for i in range(len(rows)):
        if basis[i] >= n:
            col = next((j for j in range(n) if rows[i][j] != 0), None)
            if col is None:
                continue
            _pivot(rows, [Fraction(0)] * (n + m + 1), basis, i, col)
        keep.append(i)
    rows = [rows[i][:n] + [rows[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]

    obj = c + [Fraction(0)]
    for i, bv in enumerate(basis):
        if obj[bv] != 0:
            f = obj[bv]
            obj = [a - f * v for a, v in zip(obj, rows[i])]
    enter = _run_simplex(rows, obj, basis, range(n))

    y = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        y[bv] = rows[i][-1]
    if enter is not None:
        ray = [Fraction(0)] * n
        ray[enter] = Fraction(1)
        for i, bv in enumerate(basis):
            ray[bv] = -rows[i][enter]
        return UNBOUNDED, None, y, ray
    value = sum((ci * yi for ci, yi in zip(c, y)), Fraction(0))
    return OPTIMAL, value, y, None


def _push_to_vertex(x: RatVec, H: HPolyhedron) -> RatVec:
    # Slide along directions that keep every tight row tight until the tight
    # rows have full rank or the remaining direction is a lineality line.
    n = H.dim
    while True:
        tight = [H.rows[j][0] for j in H.tight_rows(x)]
        null = nullspace(tight, n)
        if not null:
            return x
        d = null[0]
        moved = False
        for direction in (d, -d):
            steps = []
            for a, b in H.rows:
                ad = inner(a, direction)
                if ad > 0:
                    steps.append((b - inner(a, x)) / ad)
            if steps:
                x = x + direction * min(steps)
                moved = True
                break
        if not moved:
            return x


def lp_max(objective, feasible: HPolyhedron) -> LpOutcome:
    """Maximize ``<objective, x>`` over an H-polyhedron, exactly.

    Free variables are split as ``x = u - v``.  An optimal basic solution is
    then pushed onto a vertex whenever the feasible set has one, so the
    witness is a vertex optimizer for pointed sets.
    """
    c = RatVec(objective)
    n = feasible.dim
    if c.dim != n:
        raise DimensionMismatch(f"objective of dimension {c.dim} vs set of dimension {n}")
    m = len(feasible.rows)
    A = []
    b = []
    for j, (a, off) in enumerate(feasible.rows):
        A.append(list(a) + [-v for v in a] + [Fraction(int(k == j)) for k in range(m)])
        b.append(off)
    cost = list(c) + [-v for v in c] + [Fraction(0)] * m
    if m == 0:
        # whole space
        if c.is_zero():
            return LpOutcome(OPTIMAL, Fraction(0), RatVec.zeros(n))
        return LpOutcome(UNBOUNDED, None, c)
    status, value, y, ray = solve_standard(A, b, cost)
    if status == INFEASIBLE:
        return LpOutcome(INFEASIBLE)
    if status == UNBOUNDED:
        d = RatVec(ray[k] - ray[n + k] for k in range(n))
        return LpOutcome(UNBOUNDED, None, d)
    x = RatVec(y[k] - y[n + k] for k in range(n))
    x = _push_to_vertex(x, feasible)
    return LpOutcome(OPTIMAL, inner(c, x), x)


# ---------------------------------------------------------------------------
# generator-side queries


def _check_dims(dim: int, *vectors) -> None:
    for v in vectors:
        if len(v) != dim:
            raise DimensionMismatch(f"vector of dimension {len(v)} where {dim} expected")


def cone_member(d, generators: Sequence) -> bool:
    """True iff ``d`` is a nonnegative combination of ``generators``."""
    d = RatVec(d)
    gens = [RatVec(g) for g in generators]
    _check_dims(d.dim, *gens)
    if d.is_zero():
        return True
    if not gens:
        return False
    A = [[g[k] for g in gens] for k in range(d.dim)]
    status, *_ = solve_standard(A, list(d), [0] * len(gens))
    return status == OPTIMAL


def convex_weights(x, C: VPolyhedron):
    """Weights ``(lam, mu)`` with ``x = sum lam_i v_i + sum mu_j r_j``, or None."""
    x = RatVec(x)
    _check_dims(C.dim, x)
    if C.is_empty:
        return None
    gens = list(C.vertices) + list(C.rays)
    nv = len(C.vertices)
    A = [[g[k] for g in gens] for k in range(C.dim)]
    A.append([Fraction(1)] * nv + [Fraction(0)] * len(C.rays))
    status, _, y, _ = solve_standard(A, list(x) + [Fraction(1)], [0] * len(gens))
    if status != OPTIMAL:
        return None
    return tuple(y[:nv]), tuple(y[nv:])


def v_member(x, C: VPolyhedron) -> bool:
    """Membership in ``conv(vertices) + cone(rays)``."""
    x = RatVec(x)
    _check_dims(C.dim, x)
    if C.is_empty:
        return False
    if x in C.vertices:
        return True
    return convex_weights(x, C) is not None


def support_value(C: VPolyhedron, xstar):
    """``sup_{x in C} <x, x*>``; returns :data:`INF` when unbounded."""
    xstar = RatVec(xstar)
    if C.is_empty:
        raise EmptySet("support functional of the empty set")
    _check_dims(C.dim, xstar)
    if any(inner(r, xstar) > 0 for r in C.rays):
        return INF
    return max(inner(v, xstar) for v in C.vertices)


def barrier_member(xstar, C: VPolyhedron) -> bool:
    return support_value(C, xstar) != INF


def recession_member(d, C) -> bool:
    """``d`` in the recession cone of ``C`` (V- or H-represented)."""
    d = RatVec(d)
    if isinstance(C, VPolyhedron):
        if C.is_empty:
            raise EmptySet("recession cone of the empty set")
        _check_dims(C.dim, d)
        return cone_member(d, C.rays)
    _check_dims(C.dim, d)
    if lp_max(RatVec.zeros(C.dim), C).status == INFEASIBLE:
        raise EmptySet("recession cone of the empty set")
    return all(inner(a, d) <= 0 for a, _ in C.rows)


def project_polytope(z, C: VPolyhedron) -> RatVec:
    """Euclidean projection of ``z`` onto a polytope, exactly.

    Walks vertex subsets in order of size (at most ``dim + 1`` by
    Caratheodory), projects onto each affine hull, and accepts the first
    candidate lying in the simplex that satisfies the variational
    inequality against every vertex.
    """
    z = RatVec(z)
    if C.is_empty:
        raise EmptySet("projection onto the empty set")
    if not C.is_bounded:
        raise UnboundedSet("project_polytope needs a set without rays")
    _check_dims(C.dim, z)
    verts = dedupe(C.vertices)

    def optimal(p: RatVec) -> bool:
        r = z - p
        return all(inner(v - p, r) <= 0 for v in verts)

    for size in range(1, min(len(verts), C.dim + 1) + 1):
        for subset in combinations(verts, size):
            v0 = subset[0]
            dirs = [v - v0 for v in subset[1:]]
            if dirs:
                gram = [[inner(a, b) for b in dirs] for a in dirs]
                t = solve_square(gram, [inner(a, z - v0) for a in dirs])
                if t is None or any(ti < 0 for ti in t) or sum(t) > 1:
                    continue
                p = v0
                for ti, d in zip(t, dirs):
                    p = p + d * ti
            else:
                p = v0
            if optimal(p):
                return p
    raise AssertionError("no projection candidate found")  # unreachable for nonempty polytopes
