"""Finite set-valued operators identified with their graphs.

A :class:`FiniteOperator` is a list of pairs ``(x, x*)``.  Checks return
``True`` or a certificate object that evaluates false, so both
``if is_monotone(T):`` and ``cert = is_monotone(T)`` read naturally.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import DimensionMismatch, EmptyOperator, NotCyclicallyMonotone
from .exactgeom import RatVec, dedupe, inner


@dataclass(frozen=True)
class FiniteOperator:
    pairs: tuple[tuple[RatVec, RatVec], ...]
    primal_dim: int
    dual_dim: int
    # Recession directions of dom A when the pairs sample an operator whose
    # domain is unbounded (only meaningful for operators on X x R).
    domain_rays: tuple[RatVec, ...] = ()

    def __init__(self, pairs: Iterable = (), dim: int | None = None, dual_dim: int | None = None,
                 domain_rays: Iterable = ()):
        ps = tuple(dict.fromkeys((RatVec(x), RatVec(xs)) for x, xs in pairs))
        if dim is None:
            if not ps:
                raise ValueError("dim is required for an empty operator")
            dim = ps[0][0].dim
        if dual_dim is None:
            dual_dim = dim
        for x, xs in ps:
            if x.dim != dim or xs.dim != dual_dim:
                raise DimensionMismatch(f"pair ({x}, {xs}) does not live in Q^{dim} x Q^{dual_dim}")
        rays = tuple(RatVec(r) for r in domain_rays)
        for r in rays:
            if r.dim != dim:
                raise DimensionMismatch(f"domain ray {r} is not of dimension {dim}")
        object.__setattr__(self, "pairs", ps)
        object.__setattr__(self, "primal_dim", dim)
        object.__setattr__(self, "dual_dim", dual_dim)
        object.__setattr__(self, "domain_rays", rays)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __contains__(self, pair) -> bool:
        x, xs = pair
        return (RatVec(x), RatVec(xs)) in self.pairs

    def with_pairs(self, pairs) -> "FiniteOperator":
        return FiniteOperator(pairs, self.primal_dim, self.dual_dim, self.domain_rays)


def domain(T: FiniteOperator) -> list[RatVec]:
    return list(dedupe(x for x, _ in T.pairs))


def range_(T: FiniteOperator) -> list[RatVec]:
    return list(dedupe(xs for _, xs in T.pairs))


def values_at(T: FiniteOperator, x) -> list[RatVec]:
    x = RatVec(x)
    return list(dedupe(xs for y, xs in T.pairs if y == x))


def invert(T: FiniteOperator) -> FiniteOperator:
    return FiniteOperator(((xs, x) for x, xs in T.pairs), T.dual_dim, T.primal_dim)


@dataclass(frozen=True)
class MonotonicityViolation:
    i: int
    j: int
    pair1: tuple[RatVec, RatVec]
    pair2: tuple[RatVec, RatVec]
    gap: Fraction

    def __bool__(self) -> bool:
        return False

    def recompute(self) -> Fraction:
        (x1, s1), (x2, s2) = self.pair1, self.pair2
        return inner(x1 - x2, s1 - s2)


@dataclass(frozen=True)
class CycleViolation:
    indices: tuple[int, ...]
    pairs: tuple[tuple[RatVec, RatVec], ...]
    cycle_sum: Fraction

    def __bool__(self) -> bool:
        return False

    def recompute(self) -> Fraction:
        return cycle_sum(self.pairs)


def cycle_sum(pairs) -> Fraction:
    """``sum_i <x_i - x_{i+1}, x_i*>`` with the cycle closed back to ``x_0``."""
    k = len(pairs)
    return sum((inner(pairs[i][0] - pairs[(i + 1) % k][0], pairs[i][1]) for i in range(k)),
               Fraction(0))


def is_monotone(T: FiniteOperator):
    """True, or the lexicographically first pair with the most negative gap."""
    worst = None
    ps = T.pairs
    for i in range(len(ps)):
        x1, s1 = ps[i]
        for j in range(i + 1, len(ps)):
            x2, s2 = ps[j]
            gap = inner(x1 - x2, s1 - s2)
            if gap < 0 and (worst is None or gap < worst[0]):
                worst = (gap, i, j)
    if worst is None:
        return True
    gap, i, j = worst
    return MonotonicityViolation(i, j, ps[i], ps[j], gap)


def _edge_cost(ps, i, j) -> Fraction:
    # cost(i -> j) = <x_i - x_j, x_i*>, one term of the cycle sum
    return inner(ps[i][0] - ps[j][0], ps[i][1])


def _canonical(cycle: list[int]) -> tuple[int, ...]:
    k = cycle.index(min(cycle))
    return tuple(cycle[k:] + cycle[:k])


def _negative_cycle(ps):
    n = len(ps)
    cost = [[_edge_cost(ps, i, j) for j in range(n)] for i in range(n)]
    dist = [Fraction(0)] * n
    pred: list[int | None] = [None] * n
    last = None
    for _ in range(n):
        last = None
        for i in range(n):
            di = dist[i]
            row = cost[i]
            for j in range(n):
                if i != j and di + row[j] < dist[j]:
                    dist[j] = di + row[j]
                    pred[j] = i
                    last = j
        if last is None:
            return None
    # a relaxation in round n means a negative cycle is reachable from `last`
    v = last
    for _ in range(n):
        v = pred[v]
    cycle = [v]
    u = pred[v]
    while u != v:
        cycle.append(u)
        u = pred[u]
    cycle.reverse()
    return _canonical(cycle)


def is_cyclically_monotone(T: FiniteOperator):
    """True, or a cycle of pairs whose cycle sum is negative.

    Pairs are nodes of a complete digraph with edge cost
    ``<x_i - x_j, x_i*>``; a negative-cost cycle is exactly a violated
    cyclic-monotonicity inequality.  Bellman-Ford from a virtual source.
    """
    ps = T.pairs
    cyc = _negative_cycle(ps)
    if cyc is None:
        return True
    cpairs = tuple(ps[i] for i in cyc)
    return CycleViolation(cyc, cpairs, cycle_sum(cpairs))


def longest_chains(T: FiniteOperator, base: int = 0) -> list[Fraction]:
    """Sup over chains ``base -> ... -> i`` of ``sum <x_{k+1} - x_k, x_k*>``."""
    ps = T.pairs
    n = len(ps)
    dist: list[Fraction | None] = [None] * n
    dist[base] = Fraction(0)
    for _ in range(n - 1):
        changed = False
        for i in range(n):
            if dist[i] is None:
                continue
            for j in range(n):
                if i == j:
                    continue
                cand = dist[i] + _edge_cost(ps, i, j)
                if dist[j] is None or cand < dist[j]:
                    dist[j] = cand
                    changed = True
        if not changed:
            break
    return [-d for d in dist]


def rockafellar_potential(T: FiniteOperator, base: int = 0):
    """Max-affine ``f`` with ``T`` inside its subdifferential and ``f(x_base) = 0``.

    ``f(x) = max_i (phi_i + <x - x_i, x_i*>)`` where ``phi_i`` is the longest
    chain weight from the base pair to pair ``i``.
    """
    from .convexpoly import MaxAffineFunction

    if not T.pairs:
        raise EmptyOperator("potential of an empty operator")
    if not 0 <= base < len(T.pairs):
        raise IndexError(f"base index {base} out of range")
    verdict = is_cyclically_monotone(T)
    if verdict is not True:
        raise NotCyclicallyMonotone(verdict)
    phi = longest_chains(T, base)
    pieces = [(xs, phi[i] - inner(x, xs)) for i, (x, xs) in enumerate(T.pairs)]
    return MaxAffineFunction(pieces, T.dual_dim)
