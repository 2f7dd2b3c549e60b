"""Executable checks: validate hypotheses, build the construction, verify the conclusion.

Every check returns a :class:`CheckReport`.  The conclusion is only
evaluated when all hypotheses hold; every certificate carries the numbers
needed to re-verify it by substitution.  Maximal monotonicity is never
decided, only sampled (``MintySample`` evidence).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any

from .convexpoly import (
    MaxAffineFunction,
    epi_to_value,
    epigraph,
    epigraph_conditions,
    evaluate,
    normal_cone_generators,
    normal_cone_member,
    sublinear_from_polytope,
    subdifferential,
)
from .exactgeom import (
    INF,
    OPTIMAL,
    RatVec,
    VPolyhedron,
    cone_member,
    dedupe,
    inner,
    lp_max,
    project_polytope,
    support_value,
    v_member,
)
from .operators import FiniteOperator, domain, is_monotone, range_, values_at

RESULT_IDS = (
    "Prop2_1", "Cor2_2", "Thm2_3", "Thm2_5", "Lem3_1", "Lem3_2",
    "Cor3_3", "Prop3_4", "Thm3_5", "Rationalize", "MintySample",
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_HYPOTHESIS = 2
EXIT_CONCLUSION = 3


@dataclass
class Hypothesis:
    name: str
    holds: bool
    witness: Any = None


@dataclass
class CheckReport:
    result_id: str
    hypotheses: list[Hypothesis] = field(default_factory=list)
    conclusion: bool | None = None
    certificates: list[dict] = field(default_factory=list)
    deterministic_seed: int = 0
    evidence: list["CheckReport"] = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return all(h.holds for h in self.hypotheses)

    @property
    def exit_code(self) -> int:
        if not self.hypotheses_hold:
            return EXIT_HYPOTHESIS
        return EXIT_OK if self.conclusion else EXIT_CONCLUSION

    @property
    def passed(self) -> bool:
        return self.exit_code == EXIT_OK


def rand_rat(rng: random.Random, lo: int, hi: int, max_den: int = 16) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(lo * den, hi * den), den)


# ---------------------------------------------------------------------------
# normal cones and sublinear functions


def _zero_values_hypothesis(T: FiniteOperator) -> Hypothesis:
    zero = RatVec.zeros(T.dual_dim)
    missing = [x for x in domain(T) if zero not in values_at(T, x)]
    return Hypothesis("zero_in_every_value", not missing, missing[0] if missing else None)


def _monotone_hypothesis(T: FiniteOperator) -> Hypothesis:
    verdict = is_monotone(T)
    return Hypothesis("monotone", verdict is True, None if verdict is True else verdict)


def check_prop_basic(T: FiniteOperator, seed: int = 0) -> CheckReport:
    """Monotone ``T`` with ``0`` in every value set lies inside ``N_{conv dom T}``."""
    rep = CheckReport("Prop2_1", deterministic_seed=seed)
    rep.hypotheses = [_monotone_hypothesis(T), _zero_values_hypothesis(T)]
    if not rep.hypotheses_hold:
        return rep
    if not T.pairs:
        rep.conclusion = True
        return rep
    C = VPolyhedron(domain(T), (), T.primal_dim)
    ok = True
    for x, xs in T.pairs:
        member = normal_cone_member(C, x, xs)
        gap = max(inner(v - x, xs) for v in C.vertices)
        rep.certificates.append({"kind": "normal_cone", "x": x, "xstar": xs,
                                 "max_vertex_gap": gap, "holds": member})
        ok &= member
    rep.conclusion = ok
    return rep


def _range_hypothesis(T: FiniteOperator) -> Hypothesis:
    at_zero = set(values_at(T, RatVec.zeros(T.primal_dim)))
    extra = [xs for xs in range_(T) if xs not in at_zero]
    return Hypothesis("range_equals_value_at_zero", not extra, extra[0] if extra else None)


def check_cor_basic2(T: FiniteOperator, seed: int = 0) -> CheckReport:
    """Monotone ``T`` with ``range T = T(0)`` lies inside the subdifferential of ``sigma_{conv T(0)}``."""
    rep = CheckReport("Cor2_2", deterministic_seed=seed)
    rep.hypotheses = [_monotone_hypothesis(T), _range_hypothesis(T)]
    if not rep.hypotheses_hold:
        return rep
    if not T.pairs:
        rep.conclusion = True
        return rep
    D = VPolyhedron(values_at(T, RatVec.zeros(T.primal_dim)), (), T.dual_dim)
    ok = True
    for x, xs in T.pairs:
        sv = support_value(D, x)
        in_d = v_member(xs, D)
        holds = in_d and inner(x, xs) == sv
        rep.certificates.append({"kind": "support_subgradient", "x": x, "xstar": xs,
                                 "pairing": inner(x, xs), "support_value": sv,
                                 "in_hull": in_d, "holds": holds})
        ok &= holds
    rep.conclusion = ok
    return rep


def check_thm_normal_cones(T: FiniteOperator | None = None, C: VPolyhedron | None = None,
                           minty_samples: int = 50, seed: int = 0) -> CheckReport:
    """Normal-cone characterisation.

    With ``T``: runs the inclusion check and attaches Minty evidence for the
    candidate set ``conv dom T``.  With only ``C``: checks the finitely
    decidable part of the converse (``0`` in ``N_C`` at every vertex) and
    attaches Minty evidence for ``N_C``.
    """
    rep = CheckReport("Thm2_3", deterministic_seed=seed)
    if T is None:
        if C is None:
            raise ValueError("need an operator or a set")
        zero = RatVec.zeros(C.dim)
        bad = [v for v in C.vertices if not normal_cone_member(C, v, zero)]
        rep.hypotheses = [Hypothesis("zero_in_normal_cone_at_vertices", not bad,
                                     bad[0] if bad else None)]
        candidate = C
        rep.conclusion = True
    else:
        base = check_prop_basic(T, seed)
        rep.hypotheses = base.hypotheses
        if not rep.hypotheses_hold:
            return rep
        rep.certificates = base.certificates
        rep.conclusion = base.conclusion
        if not T.pairs:
            return rep
        candidate = VPolyhedron(domain(T), (), T.primal_dim)
        rep.certificates.append({"kind": "candidate_set", "vertices": list(candidate.vertices)})
    if minty_samples:
        ev = minty_sample(candidate, count=minty_samples, seed=seed)
        rep.evidence.append(ev)
        rep.conclusion = bool(rep.conclusion and ev.conclusion)
    return rep


def check_thm_sublinear(T: FiniteOperator, minty_samples: int = 50, seed: int = 0) -> CheckReport:
    """Sublinear characterisation: recover ``s = sigma_{conv T(0)}`` and verify ``T`` inside ``ds``."""
    rep = CheckReport("Thm2_5", deterministic_seed=seed)
    base = check_cor_basic2(T, seed)
    rep.hypotheses = base.hypotheses
    if not rep.hypotheses_hold:
        return rep
    if not T.pairs:
        rep.conclusion = True
        return rep
    D = VPolyhedron(values_at(T, RatVec.zeros(T.primal_dim)), (), T.dual_dim)
    s = sublinear_from_polytope(D)
    rep.certificates.append({"kind": "sublinear_candidate", "function": s})
    ok = bool(base.conclusion)
    for x, xs in T.pairs:
        member = v_member(xs, subdifferential(s, x))
        rep.certificates.append({"kind": "subgradient", "x": x, "xstar": xs, "holds": member})
        ok &= member
    rep.conclusion = ok
    if minty_samples:
        ev = minty_sample_support(D, count=minty_samples, seed=seed)
        rep.evidence.append(ev)
        rep.conclusion = bool(rep.conclusion and ev.conclusion)
    return rep


# ---------------------------------------------------------------------------
# epigraphs and the slice operator


def slice_cone(generators, level: Fraction = Fraction(-1)) -> tuple[list[RatVec], list[RatVec]]:
    """V-rep of ``{y in cone(generators) : last(y) = level}``, projected off the last coordinate."""
    gens = [RatVec(g) for g in generators]
    neg = [g for g in gens if g[-1] < 0]
    pos = [g for g in gens if g[-1] > 0]
    zero = [g for g in gens if g[-1] == 0]
    if level < 0:
        verts = [(g * (level / g[-1])).head() for g in neg]
    else:
        verts = [(g * (level / g[-1])).head() for g in pos]
    rays = [g.head() for g in zero]
    for gn in neg:
        for gp in pos:
            rays.append((gn * gp[-1] - gp * gn[-1]).head())
    return list(dedupe(verts)), [r for r in dedupe(rays) if not r.is_zero()]


def lift_AX(f: MaxAffineFunction, x) -> VPolyhedron:
    """``A_X(x)`` for ``A = N_{epi f}``: the ``-1`` slice of the epigraph normal cone at ``(x, f(x))``."""
    x = RatVec(x)
    fx = evaluate(f, x)
    gens = normal_cone_generators(epigraph(f), x.extend(fx))
    verts, rays = slice_cone(gens)
    return VPolyhedron(verts, rays, f.dim)


def epi_normal_member(f: MaxAffineFunction, point, normal) -> tuple[bool, Any]:
    """Definitional test of ``normal in N_{epi f}(point)`` via one LP over the epigraph."""
    H = epigraph(f)
    point, normal = RatVec(point), RatVec(normal)
    if point not in H:
        return False, "point outside epigraph"
    out = lp_max(normal, H)
    if out.status != OPTIMAL:
        return False, "support unbounded"
    return out.value <= inner(point, normal), out.value


def check_lemma_lambda(f: MaxAffineFunction, x, lam, xstar, seed: int = 0) -> CheckReport:
    """If ``(x*, -1)`` is normal to ``epi f`` at ``(x, lam)`` then ``lam = f(x)``."""
    rep = CheckReport("Lem3_2", deterministic_seed=seed)
    x, xstar = RatVec(x), RatVec(xstar)
    lam = Fraction(lam)
    member, detail = epi_normal_member(f, x.extend(lam), xstar.extend(-1))
    fx = evaluate(f, x)
    rep.certificates.append({"kind": "epi_normal_membership", "x": x, "lambda": lam,
                             "xstar": xstar, "member": member, "detail": detail,
                             "f_x": fx, "vacuous": not member})
    rep.conclusion = (not member) or lam == fx
    return rep


def _same_polytope(P: VPolyhedron, Q: VPolyhedron) -> bool:
    return (all(v_member(v, Q) for v in P.vertices) and all(v_member(v, P) for v in Q.vertices)
            and all(_ray_member(r, Q) for r in P.rays) and all(_ray_member(r, P) for r in Q.rays))


def _ray_member(r, P: VPolyhedron) -> bool:
    return cone_member(r, P.rays)


def check_cor_normal_epi(f: MaxAffineFunction, sample_xs, seed: int = 0) -> CheckReport:
    """``(N_{epi f})_X = df`` on the sampled points (mutual generator membership)."""
    rep = CheckReport("Cor3_3", deterministic_seed=seed)
    ok = True
    for x in sample_xs:
        lifted = lift_AX(f, x)
        sub = subdifferential(f, x)
        same = bool(lifted.vertices) and _same_polytope(lifted, sub)
        rep.certificates.append({"kind": "slice_equals_subdifferential", "x": RatVec(x),
                                 "slice_vertices": list(lifted.vertices),
                                 "subdifferential_vertices": list(sub.vertices), "holds": same})
        ok &= same
    rep.conclusion = ok
    return rep


def check_lemma_char_epi(C: VPolyhedron, seed: int = 0) -> CheckReport:
    """Epigraph characterisation: conditions i-iii, then ``C = epi f`` for ``f = inf`` over fibres."""
    rep = CheckReport("Lem3_1", deterministic_seed=seed)
    cond = epigraph_conditions(C)
    rep.hypotheses = [
        Hypothesis("nonempty_convex_closed", cond.cond_i, cond.witness_i),
        Hypothesis("barrier_meets_minus_one_slice", cond.cond_ii, cond.witness_ii),
        Hypothesis("upward_recession", cond.cond_iii, cond.witness_iii),
    ]
    if not rep.hypotheses_hold:
        return rep
    ok = True
    for v in C.vertices:
        x, lam = v.head(), v[-1]
        fx = epi_to_value(C, x)
        holds = fx != INF and fx <= lam and v_member(x.extend(fx), C)
        rep.certificates.append({"kind": "fibre_minimum", "x": x, "lambda": lam,
                                 "f_x": fx, "holds": holds})
        ok &= holds
    rep.conclusion = ok
    return rep


def _grid(n: int, radius: int):
    return (RatVec(p) for p in product(range(-radius, radius + 1), repeat=n))


def check_prop_basic3(A: FiniteOperator, grid: int = 3, seed: int = 0) -> CheckReport:
    """Operators on ``X x R``: conditions i-iii on ``cl conv dom A`` give ``A_X`` inside ``df``.

    ``dom A`` is the sampled domain plus ``A.domain_rays``.  The subgradient
    conclusion is decided through the normal cone of the epigraph at
    ``(x, f(x))`` and cross-checked on an integer grid of radius ``grid``.
    """
    rep = CheckReport("Prop3_4", deterministic_seed=seed)
    if A.primal_dim < 2:
        raise ValueError("operators for this check act on X x R with dim X >= 1")
    zero = RatVec.zeros(A.dual_dim)
    rep.hypotheses = [_monotone_hypothesis(A)]
    if not A.pairs:
        rep.hypotheses.append(Hypothesis("nonempty_domain", False))
        return rep
    C = VPolyhedron(domain(A), A.domain_rays, A.primal_dim)
    cond = epigraph_conditions(C)
    missing = [p for p in domain(A) if zero not in values_at(A, p)]
    rep.hypotheses += [
        Hypothesis("cond_i_nonempty_convex_closed", cond.cond_i, cond.witness_i),
        Hypothesis("cond_ii_barrier_meets_minus_one_slice", cond.cond_ii, cond.witness_ii),
        Hypothesis("cond_iii_upward_recession", cond.cond_iii, cond.witness_iii),
        Hypothesis("zero_in_every_value", not missing, missing[0] if missing else None),
    ]
    if not rep.hypotheses_hold:
        return rep
    n = A.primal_dim - 1
    cache: dict[RatVec, Any] = {}

    def f(y: RatVec):
        if y not in cache:
            cache[y] = epi_to_value(C, y)
        return cache[y]

    probes = list(_grid(n, grid)) + [v.head() for v in C.vertices]
    ok = True
    for p, ps in A.pairs:
        if ps[-1] != -1:
            continue
        x, lam, xs = p.head(), p[-1], ps.head()
        fx = f(x)
        exact = fx == lam and normal_cone_member(C, x.extend(fx), ps)
        worst = None
        for y in probes:
            fy = f(y)
            if fy == INF:
                continue
            slack = fy - fx - inner(y - x, xs)
            if worst is None or slack < worst[0]:
                worst = (slack, y)
        grid_ok = worst is None or worst[0] >= 0
        holds = exact and grid_ok
        rep.certificates.append({"kind": "slice_subgradient", "x": x, "lambda": lam, "xstar": xs,
                                 "f_x": fx, "normal_cone_route": exact,
                                 "min_grid_slack": None if worst is None else worst[0],
                                 "argmin_grid": None if worst is None else worst[1],
                                 "holds": holds})
        ok &= holds
    rep.conclusion = ok
    return rep


def check_thm_main(f: MaxAffineFunction, sample_xs, seed: int = 0) -> CheckReport:
    """Round trip with ``A = N_{epi f}``: conditions i-iii on ``epi f`` and ``A_X = df`` on samples."""
    rep = CheckReport("Thm3_5", deterministic_seed=seed)
    cond = epigraph_conditions(epigraph(f))
    rep.hypotheses = [
        Hypothesis("A_monotone", True, "normal cone operator"),
        Hypothesis("cond_i_nonempty_convex_closed", cond.cond_i, cond.witness_i),
        Hypothesis("cond_ii_barrier_meets_minus_one_slice", cond.cond_ii, cond.witness_ii),
        Hypothesis("cond_iii_upward_recession", cond.cond_iii, cond.witness_iii),
        Hypothesis("zero_in_every_value", True, "0 lies in every normal cone"),
    ]
    if not rep.hypotheses_hold:
        return rep
    sub = check_cor_normal_epi(f, sample_xs, seed)
    rep.certificates = sub.certificates
    rep.conclusion = sub.conclusion
    return rep


# ---------------------------------------------------------------------------
# maximality evidence and the supply application


def _random_points(C: VPolyhedron, count: int, rng: random.Random) -> list[RatVec]:
    lo = [min(v[k] for v in C.vertices) for k in range(C.dim)]
    hi = [max(v[k] for v in C.vertices) for k in range(C.dim)]
    pts = []
    for _ in range(count):
        coords = []
        for k in range(C.dim):
            span = hi[k] - lo[k] + 2
            t = rand_rat(rng, 0, 1)
            coords.append(lo[k] - 1 + span * t)
        pts.append(RatVec(coords))
    return pts


def minty_sample(C: VPolyhedron, zs=None, count: int = 50, seed: int = 0) -> CheckReport:
    """Surjectivity evidence for ``Id + N_C``: every ``z`` splits as ``p + (z - p)`` with ``z - p`` normal at ``p``."""
    rep = CheckReport("MintySample", deterministic_seed=seed)
    if zs is None:
        zs = _random_points(C, count, random.Random(seed))
    ok = True
    for z in zs:
        z = RatVec(z)
        p = project_polytope(z, C)
        r = z - p
        gap = max(inner(v - p, r) for v in C.vertices)
        holds = normal_cone_member(C, p, r) and p + r == z
        rep.certificates.append({"kind": "resolvent", "z": z, "p": p, "residual": r,
                                 "max_vertex_gap": gap, "holds": holds})
        ok &= holds
    rep.conclusion = ok
    return rep


def minty_sample_support(D: VPolyhedron, zs=None, count: int = 50, seed: int = 0) -> CheckReport:
    """Surjectivity evidence for ``Id + d sigma_D`` using ``prox = Id - P_D``."""
    rep = CheckReport("MintySample", deterministic_seed=seed)
    if zs is None:
        zs = _random_points(D, count, random.Random(seed))
    s = sublinear_from_polytope(D)
    ok = True
    for z in zs:
        z = RatVec(z)
        q = project_polytope(z, D)
        p = z - q
        holds = v_member(q, subdifferential(s, p)) and p + q == z
        rep.certificates.append({"kind": "resolvent", "z": z, "p": p, "residual": q,
                                 "holds": holds})
        ok &= holds
    rep.conclusion = ok
    return rep


def rationalize_supply(T: FiniteOperator, production_set: VPolyhedron | None = None,
                       seed: int = 0) -> CheckReport:
    """Profit-maximisation rationalisation of price -> supply observations.

    Without ``production_set`` the candidate technology is ``conv T(0)`` and
    the hypotheses are the law of supply plus ``range T = T(0)``.  With an
    explicit production set the hypotheses are the law of supply plus
    feasibility of every observed supply, and the conclusion can fail.
    """
    rep = CheckReport("Rationalize", deterministic_seed=seed)
    mono = _monotone_hypothesis(T)
    if production_set is None:
        rep.hypotheses = [mono, _range_hypothesis(T)]
        if not rep.hypotheses_hold:
            return rep
        if not T.pairs:
            rep.conclusion = True
            return rep
        Y = VPolyhedron(values_at(T, RatVec.zeros(T.primal_dim)), (), T.dual_dim)
    else:
        Y = production_set
        infeasible = [z for z in range_(T) if not v_member(z, Y)]
        rep.hypotheses = [mono, Hypothesis("supplies_feasible", not infeasible,
                                           infeasible[0] if infeasible else None)]
        if not rep.hypotheses_hold:
            return rep
    rep.certificates.append({"kind": "production_set", "vertices": list(Y.vertices),
                             "rays": list(Y.rays)})
    rep.conclusion = _gap_certificates(rep, T, Y)
    return rep


def _gap_certificates(rep: CheckReport, T: FiniteOperator, Y: VPolyhedron) -> bool:
    ok = True
    for p, z in T.pairs:
        sv = support_value(Y, p)
        profit = inner(p, z)
        holds = profit == sv
        rep.certificates.append({"kind": "profit_max", "price": p, "supply": z, "profit": profit,
                                 "max_profit": sv, "gap": sv - profit if sv != INF else INF,
                                 "holds": holds})
        ok &= holds
    return ok
