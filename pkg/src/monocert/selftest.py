"""Randomized property suite behind ``monocert selftest``.

Each suite draws seeded instances, runs one family of checks and counts
passes.  The first failing instance is shrunk greedily (dropping pairs or
pieces while the failure persists) and embedded in the output.
"""

from __future__ import annotations

import random
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Callable

from . import convexpoly
from .convexpoly import (
    MaxAffineFunction,
    epigraph_conditions,
    evaluate,
    subdifferential,
    sublinear_from_polytope,
)
from .exactgeom import RatVec, VPolyhedron, inner, support_value, v_member
from .instances import (
    monotone_operator_with_zero,
    rand_int_vec,
    rand_vec,
    random_epigraph_vrep,
    random_max_affine,
    random_polytope,
    sample_points,
    subdifferential_operator,
    support_operator,
)
from .operators import FiniteOperator, domain, is_cyclically_monotone, is_monotone, rockafellar_potential
from .theorems import (
    check_cor_normal_epi,
    check_lemma_lambda,
    check_prop_basic,
    check_thm_sublinear,
    minty_sample,
    rand_rat,
)

DEFAULT_COUNTS = {
    "rotation": 1,
    "rockafellar": 100,
    "normal_epi": 100,
    "normal_cones": 100,
    "sublinear": 100,
    "epigraph_conditions": 50,
    "lambda": 100,
}


@dataclass
class SuiteResult:
    name: str
    results: tuple[str, ...]
    total: int = 0
    passed: int = 0
    counterexample: Any = None
    notes: dict = field(default_factory=dict)

    @property
    def failed(self) -> int:
        return self.total - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, holds: bool, instance=None, still_fails: Callable | None = None) -> None:
        self.total += 1
        if holds:
            self.passed += 1
        elif self.counterexample is None:
            if still_fails is not None:
                instance = shrink(instance, still_fails)
            self.counterexample = instance

    def to_json(self) -> dict:
        return {"suite": self.name, "results": list(self.results), "total": self.total,
                "passed": self.passed, "failed": self.failed, "notes": self.notes,
                "counterexample": self.counterexample}


def shrink(instance, still_fails: Callable):
    """Greedy one-at-a-time deletion of operator pairs or function pieces."""
    def parts(obj):
        if isinstance(obj, FiniteOperator):
            return list(obj.pairs)
        if isinstance(obj, MaxAffineFunction):
            return list(obj.pieces)
        return None

    def rebuild(obj, items):
        if isinstance(obj, FiniteOperator):
            return obj.with_pairs(items)
        return MaxAffineFunction(items, obj.dim)

    items = parts(instance)
    if items is None:
        return instance
    changed = True
    while changed and len(items) > 1:
        changed = False
        for k in range(len(items)):
            trial = rebuild(instance, items[:k] + items[k + 1:])
            try:
                fails = still_fails(trial)
            except Exception:
                fails = False
            if fails:
                instance, items, changed = trial, items[:k] + items[k + 1:], True
                break
    return instance


# ---------------------------------------------------------------------------
# suites


def suite_rotation(seed: int, count: int) -> SuiteResult:
    res = SuiteResult("rotation_counterexample", ("MonotoneNotCyclic",))
    T = FiniteOperator([((1, 0), (0, 1)), ((0, 1), (-1, 0)), ((-1, 0), (0, -1))])
    for _ in range(count):
        cyc = is_cyclically_monotone(T)
        holds = (is_monotone(T) is True and cyc is not True
                 and cyc.cycle_sum == -2 and cyc.recompute() == -2)
        res.record(holds, T)
        if cyc is not True:
            res.notes["cycle"] = list(cyc.indices)
            res.notes["cycle_sum"] = cyc.cycle_sum
    return res


def _contains_graph(T: FiniteOperator, g: MaxAffineFunction) -> bool:
    return all(v_member(xs, subdifferential(g, x)) for x, xs in T.pairs)


def _rockafellar_fails(T: FiniteOperator) -> bool:
    if is_cyclically_monotone(T) is not True:
        return True
    return not _contains_graph(T, rockafellar_potential(T))


def suite_rockafellar(seed: int, count: int) -> SuiteResult:
    res = SuiteResult("rockafellar_round_trip", ("CyclicMonotone", "RockafellarPotential"))
    rng = random.Random(seed * 1009 + 2)
    for _ in range(count):
        f = random_max_affine(rng)
        T = subdifferential_operator(rng, f, rng.randint(1, 12))
        res.record(not _rockafellar_fails(T), T, _rockafellar_fails)
    return res


def suite_normal_epi(seed: int, count: int, samples: int = 20) -> SuiteResult:
    res = SuiteResult("slice_equals_subdifferential", ("Cor3_3", "Thm3_5"))
    rng = random.Random(seed * 1009 + 2)
    matches = 0
    for _ in range(count):
        f = random_max_affine(rng)
        subdifferential_operator(rng, f, rng.randint(1, 12))  # keep the same f sequence as above
        xs = sample_points(rng, f.dim, samples)
        rep = check_cor_normal_epi(f, xs, seed)
        matches += sum(1 for c in rep.certificates if c["holds"])
        res.record(bool(rep.conclusion), f,
                   lambda g: not check_cor_normal_epi(g, xs, seed).conclusion)
    res.notes["matches"] = matches
    res.notes["samples"] = count * samples
    return res


def _prop_basic_fails(T: FiniteOperator) -> bool:
    rep = check_prop_basic(T)
    return rep.hypotheses_hold and not rep.conclusion


def suite_normal_cones(seed: int, count: int, minty: int = 50) -> SuiteResult:
    res = SuiteResult("normal_cone_inclusion", ("Prop2_1", "Thm2_3", "MintySample"))
    rng = random.Random(seed * 1009 + 4)
    minty_ok = minty_total = 0
    for k in range(count):
        T = monotone_operator_with_zero(rng)
        rep = check_prop_basic(T, seed)
        ev = minty_sample(VPolyhedron(domain(T), (), T.primal_dim), count=minty, seed=seed + k)
        n_ok = sum(1 for c in ev.certificates if c["holds"])
        minty_ok += n_ok
        minty_total += len(ev.certificates)
        holds = rep.passed and n_ok == minty
        res.record(holds, T, _prop_basic_fails if not rep.passed else None)
    res.notes["minty_passed"] = minty_ok
    res.notes["minty_total"] = minty_total
    return res


def suite_sublinear(seed: int, count: int, samples: int = 20) -> SuiteResult:
    res = SuiteResult("sublinear_recovery", ("Cor2_2", "Thm2_5"))
    rng = random.Random(seed * 1009 + 5)
    for _ in range(count):
        D = random_polytope(rng)
        T = support_operator(rng, D)
        rep = check_thm_sublinear(T, minty_samples=0, seed=seed)
        s = sublinear_from_polytope(D)
        same = all(evaluate(s, x) == support_value(D, x)
                   for x in (rand_vec(rng, D.dim) for _ in range(samples)))
        res.record(rep.passed and same, {"polytope": D, "operator": T})
    return res


def suite_epigraph_conditions(seed: int, count: int) -> SuiteResult:
    res = SuiteResult("epigraph_conditions", ("Lem3_1",))
    rng = random.Random(seed * 1009 + 6)
    flips_iii = flips_ii = 0
    for _ in range(count):
        C, _slope = random_epigraph_vrep(rng)
        up = RatVec.unit(C.dim, C.dim - 1)
        base = epigraph_conditions(C)
        no_up = epigraph_conditions(VPolyhedron(C.vertices, [r for r in C.rays if r != up], C.dim))
        down = epigraph_conditions(VPolyhedron(C.vertices, list(C.rays) + [-up], C.dim))
        flips_iii += not no_up.cond_iii
        flips_ii += not down.cond_ii
        holds = base.all_hold and not no_up.cond_iii and not down.cond_ii
        res.record(holds, C)
    res.notes["cond_iii_flips"] = flips_iii
    res.notes["cond_ii_flips"] = flips_ii
    return res


def suite_lambda(seed: int, count: int, triples: int = 50) -> SuiteResult:
    res = SuiteResult("lambda_equals_f", ("Lem3_2",))
    rng = random.Random(seed * 1009 + 7)
    members = 0
    for _ in range(count):
        f = random_max_affine(rng)
        bad = False
        for _ in range(triples):
            x = rand_int_vec(rng, f.dim, -2, 2) if rng.random() < 0.5 else rand_vec(rng, f.dim)
            fx = evaluate(f, x)
            delta = rand_rat(rng, -2, 2)
            if delta == 0:
                delta = rng.choice((-1, 1)) * rand_rat(rng, 1, 2)
            lam = fx + delta
            if rng.random() < 0.6:
                xstar = rng.choice(subdifferential(f, x).vertices)
            else:
                xstar = rand_vec(rng, f.dim)
            rep = check_lemma_lambda(f, x, lam, xstar, seed)
            cert = rep.certificates[0]
            members += cert["member"]
            bad |= cert["member"] or not rep.conclusion
        res.record(not bad, f)
    res.notes["members_found"] = members
    res.notes["triples"] = count * triples
    return res


SUITES = (
    ("rotation", suite_rotation),
    ("rockafellar", suite_rockafellar),
    ("normal_epi", suite_normal_epi),
    ("normal_cones", suite_normal_cones),
    ("sublinear", suite_sublinear),
    ("epigraph_conditions", suite_epigraph_conditions),
    ("lambda", suite_lambda),
)


@contextmanager
def injected_fault():
    """Flip the vertex inequality inside the normal-cone membership test."""
    token = convexpoly.FLIP_NORMAL_CONE.set(True)
    try:
        yield
    finally:
        convexpoly.FLIP_NORMAL_CONE.reset(token)


def run_selftest(seed: int = 42, sizes: int | None = None, minty_samples: int = 50,
                 samples: int = 20, fault: bool = False) -> dict:
    suites = []
    with injected_fault() if fault else _null():
        for key, fn in SUITES:
            count = DEFAULT_COUNTS[key] if sizes is None else (min(sizes, 1) if key == "rotation" else sizes)
            kwargs = {}
            if key == "normal_cones":
                kwargs["minty"] = minty_samples
            if key in ("normal_epi", "sublinear"):
                kwargs["samples"] = samples
            suites.append(fn(seed, count, **kwargs))
    total = sum(s.total for s in suites)
    return {
        "seed": seed,
        "sizes": sizes,
        "fault_injected": fault,
        "vacuous": total == 0,
        "passed": all(s.ok for s in suites),
        "suites": [s.to_json() for s in suites],
    }


@contextmanager
def _null():
    yield
