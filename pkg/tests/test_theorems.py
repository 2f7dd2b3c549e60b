import random
from fractions import Fraction

import pytest

from monocert import (
    INF,
    FiniteOperator,
    MaxAffineFunction,
    MonotonicityViolation,
    RatVec,
    VPolyhedron,
    evaluate,
    inner,
    is_cyclically_monotone,
    normal_cone_member,
    rockafellar_potential,
    subdifferential,
    support_value,
    vec,
)
from monocert.exactgeom import v_member
from monocert.instances import (
    monotone_operator_with_zero,
    random_max_affine,
    random_polytope,
    sample_points,
    subdifferential_operator,
    support_operator,
)
from monocert.theorems import (
    EXIT_CONCLUSION,
    EXIT_HYPOTHESIS,
    EXIT_OK,
    check_cor_basic2,
    check_cor_normal_epi,
    check_lemma_char_epi,
    check_lemma_lambda,
    check_prop_basic,
    check_prop_basic3,
    check_thm_main,
    check_thm_normal_cones,
    check_thm_sublinear,
    lift_AX,
    minty_sample,
    rationalize_supply,
    slice_cone,
)

ABS = MaxAffineFunction([((1,), 0), ((-1,), 0)])
SQUARE = VPolyhedron([(-1, -1), (1, -1), (1, 1), (-1, 1)])


def op(*pairs, dim=None):
    return FiniteOperator(pairs, dim)


def hyp(rep, name):
    return next(h for h in rep.hypotheses if h.name == name)


# -- Prop2_1 ----------------------------------------------------------------

def test_prop_basic_interval():
    T = op(((0,), (0,)), ((1,), (0,)), ((1,), (1,)))
    rep = check_prop_basic(T)
    assert rep.hypotheses_hold and rep.conclusion is True
    assert rep.exit_code == EXIT_OK
    # oracle: N_[0,1](1) = [0, inf) by the definition
    assert normal_cone_member(VPolyhedron([(0,), (1,)]), vec(1), vec(1))


def test_prop_basic_missing_zero():
    rep = check_prop_basic(op(((0,), (0,)), ((1,), (1,))))
    h = hyp(rep, "zero_in_every_value")
    assert not h.holds and h.witness == vec(1)
    assert rep.conclusion is None and rep.exit_code == EXIT_HYPOTHESIS


def test_prop_basic_non_monotone():
    T = op(((0,), (0,)), ((1,), (0,)), ((1,), (-1,)), ((0,), (1,)))
    rep = check_prop_basic(T)
    assert isinstance(hyp(rep, "monotone").witness, MonotonicityViolation)
    assert rep.exit_code == EXIT_HYPOTHESIS


def test_prop_basic_certificates_reverify():
    rng = random.Random(3)
    for _ in range(10):
        T = monotone_operator_with_zero(rng)
        rep = check_prop_basic(T)
        dom = [x for x, _ in T.pairs]
        for c in rep.certificates:
            gap = max(inner(y - c["x"], c["xstar"]) for y in dom)
            assert gap == c["max_vertex_gap"] and (gap <= 0) == c["holds"]


# -- Cor2_2 -----------------------------------------------------------------

def test_cor_basic2_interval():
    T = op(((0,), (-1,)), ((0,), (0,)), ((0,), (1,)))
    rep = check_cor_basic2(T)
    assert rep.conclusion is True


def test_cor_basic2_extra_point():
    base = [((0,), (-1,)), ((0,), (0,)), ((0,), (1,))]
    assert check_cor_basic2(op(*base, ((1,), (1,)))).conclusion is True
    c = check_cor_basic2(op(*base, ((1,), (1,)))).certificates[-1]
    assert c["pairing"] == 1 == c["support_value"]
    rep = check_cor_basic2(op(*base, ((1,), (2,))))
    assert not hyp(rep, "range_equals_value_at_zero").holds
    assert hyp(rep, "range_equals_value_at_zero").witness == vec(2)
    assert rep.exit_code == EXIT_HYPOTHESIS


def test_cor_basic2_certificates_reverify():
    rng = random.Random(4)
    for _ in range(10):
        D = random_polytope(rng)
        rep = check_cor_basic2(support_operator(rng, D))
        assert rep.conclusion is True
        for c in rep.certificates:
            assert inner(c["x"], c["xstar"]) == c["pairing"] == support_value(D, c["x"])


# -- Thm2_3 -----------------------------------------------------------------

def test_thm_normal_cones_interval_samples():
    T = op(((0,), (0,)), ((0,), (-1,)), (("1/2",), (0,)), ((1,), (0,)), ((1,), (2,)))
    rep = check_thm_normal_cones(T, minty_samples=20, seed=1)
    assert rep.conclusion is True
    ev = rep.evidence[0]
    assert ev.conclusion and len(ev.certificates) == 20
    C = VPolyhedron([(0,), (1,)])
    for c in ev.certificates:
        # variational-inequality oracle for the projection
        assert all(inner(v - c["p"], c["residual"]) <= 0 for v in C.vertices)


def test_thm_normal_cones_converse_on_square():
    rep = check_thm_normal_cones(C=SQUARE, minty_samples=5)
    assert hyp(rep, "zero_in_normal_cone_at_vertices").holds and rep.conclusion


def test_thm_normal_cones_non_monotone():
    rep = check_thm_normal_cones(op(((0,), (0,)), ((1,), (-1,)), ((1,), (0,))))
    assert rep.exit_code == EXIT_HYPOTHESIS and not rep.evidence


# -- Thm2_5 -----------------------------------------------------------------

def test_thm_sublinear_abs():
    T = op(((-1,), (-1,)), ((0,), (-1,)), ((0,), (0,)), ((0,), (1,)), ((2,), (1,)))
    rep = check_thm_sublinear(T, minty_samples=10)
    assert rep.conclusion is True
    s = rep.certificates[0]["function"]
    assert all(evaluate(s, (t,)) == abs(t) for t in range(-3, 4))


def test_thm_sublinear_zero_map():
    T = op(((0, 0), (0, 0)), ((1, 2), (0, 0)), ((-3, 1), (0, 0)))
    rep = check_thm_sublinear(T, minty_samples=5)
    s = rep.certificates[0]["function"]
    assert rep.conclusion and evaluate(s, (5, -7)) == 0


def test_thm_sublinear_empty_value_at_zero():
    rep = check_thm_sublinear(op(((1,), (1,))))
    assert not hyp(rep, "range_equals_value_at_zero").holds


# -- consistency chain ------------------------------------------------------

@pytest.mark.parametrize("seed", range(10))
def test_consistency_chain(seed):
    rng = random.Random(seed)
    T = monotone_operator_with_zero(rng)
    if check_thm_normal_cones(T, minty_samples=5, seed=seed).passed:
        assert check_prop_basic(T).passed
    S = support_operator(rng, random_polytope(rng))
    if check_thm_sublinear(S, minty_samples=5, seed=seed).passed:
        assert check_cor_basic2(S).passed


@pytest.mark.parametrize("seed", range(10))
def test_three_routes_agree_on_subdifferential_samples(seed):
    rng = random.Random(100 + seed)
    f = random_max_affine(rng)
    T = subdifferential_operator(rng, f, 6)
    assert is_cyclically_monotone(T) is True
    g = rockafellar_potential(T)
    assert all(v_member(xs, subdifferential(g, x)) for x, xs in T.pairs)
    assert check_thm_main(f, [x for x, _ in T.pairs]).passed


# -- A_X slice ---------------------------------------------------------------

def test_slice_cone_abs_at_origin():
    verts, rays = slice_cone([vec(1, -1), vec(-1, -1)])
    assert set(verts) == {vec(1), vec(-1)} and rays == []


def test_slice_cone_with_mixed_signs():
    # cone{(1,-1), (0,1)} meets last = -1 in x >= 1
    verts, rays = slice_cone([vec(1, -1), vec(0, 1)])
    assert verts == [vec(1)] and rays == [vec(1)]


@pytest.mark.parametrize("x, expected", [((0,), {vec(1), vec(-1)}), ((3,), {vec(1)})])
def test_lift_ax_abs(x, expected):
    P = lift_AX(ABS, x)
    assert set(P.vertices) == expected
    assert set(subdifferential(ABS, x).vertices) == expected


def test_lift_ax_constant():
    c = MaxAffineFunction([((0, 0), 5)])
    assert lift_AX(c, (1, -2)).vertices == (vec(0, 0),)


@pytest.mark.parametrize("seed", range(20))
def test_lift_ax_never_empty(seed):
    rng = random.Random(seed)
    f = random_max_affine(rng)
    for x in sample_points(rng, f.dim, 5):
        assert lift_AX(f, x).vertices


# -- Lem3_2 -----------------------------------------------------------------

def test_lemma_lambda_examples():
    member = check_lemma_lambda(ABS, (1,), 1, (1,))
    assert member.conclusion and member.certificates[0]["member"]
    above = check_lemma_lambda(ABS, (1,), 2, (1,))
    assert above.conclusion and above.certificates[0]["vacuous"]
    # vertex (1,1) of epi f: <(1,1) - (1,2), (1,-1)> = 1 > 0
    assert inner(vec(1, 1) - vec(1, 2), vec(1, -1)) == 1
    below = check_lemma_lambda(ABS, (1,), "1/2", (1,))
    assert below.conclusion and below.certificates[0]["vacuous"]


# -- Cor3_3 / Thm3_5 ----------------------------------------------------------

def test_cor_normal_epi_abs():
    rep = check_cor_normal_epi(ABS, [vec(-2), vec(0), vec(2)])
    assert rep.conclusion and all(c["holds"] for c in rep.certificates)


def test_cor_normal_epi_linear():
    f = MaxAffineFunction([((2, -1), 3)])
    rep = check_cor_normal_epi(f, [vec(0, 0), vec(1, 5)])
    assert rep.conclusion
    assert all(c["slice_vertices"] == [vec(2, -1)] for c in rep.certificates)


def test_thm_main_examples():
    rep = check_thm_main(ABS, [vec(-1), vec(0), vec(1)])
    assert rep.hypotheses_hold and rep.conclusion
    zero = check_thm_main(MaxAffineFunction([((0,), 0)]), [vec(-1), vec(2)])
    assert zero.conclusion
    assert all(c["slice_vertices"] == [vec(0)] for c in zero.certificates)


def test_thm_main_batch():
    rng = random.Random(77)
    for _ in range(25):
        f = random_max_affine(rng)
        assert check_thm_main(f, sample_points(rng, f.dim, 5)).passed


# -- Lem3_1 -----------------------------------------------------------------

def test_lemma_char_epi():
    epi = VPolyhedron([(0, 0)], [(1, 1), (-1, 1), (0, 1)])
    rep = check_lemma_char_epi(epi)
    assert rep.hypotheses_hold and rep.conclusion
    flat = check_lemma_char_epi(VPolyhedron([(0, 0)], [(1, 1), (-1, 1)]))
    assert flat.hypotheses_hold  # (0,1) = half of the sum of the two rays
    bad = check_lemma_char_epi(VPolyhedron([(0, 0)], [(1, 0)]))
    assert not hyp(bad, "upward_recession").holds


# -- Prop3_4 ----------------------------------------------------------------

EPI_ABS_RAYS = [(1, 1), (-1, 1), (0, 1)]


def sampled_epi_abs(extra=()):
    pairs = [((0, 0), (0, 0)), ((0, 0), (1, -1)), ((0, 0), (-1, -1)), ((0, 0), ("1/2", -1)),
             ((1, 1), (0, 0)), ((1, 1), (1, -1)), ((-1, 1), (0, 0)), ((-1, 1), (-1, -1))]
    return FiniteOperator(pairs + list(extra), 2, domain_rays=EPI_ABS_RAYS)


def test_prop_basic3_sampled_epi_abs():
    rep = check_prop_basic3(sampled_epi_abs())
    assert rep.hypotheses_hold and rep.conclusion
    at_zero = [c["xstar"] for c in rep.certificates if c["x"] == vec(0)]
    assert all(-1 <= s[0] <= 1 for s in at_zero)
    assert all(c["min_grid_slack"] >= 0 for c in rep.certificates)


def test_prop_basic3_without_upward_rays():
    A = FiniteOperator([((0, 0), (0, 0)), ((1, 1), (0, 0))], 2)
    rep = check_prop_basic3(A)
    assert not rep.hypotheses_hold and rep.conclusion is None
    names = {h.name for h in rep.hypotheses if not h.holds}
    assert "cond_iii_upward_recession" in names


def test_prop_basic3_non_monotone():
    A = sampled_epi_abs([((1, 1), (-1, 1))])
    rep = check_prop_basic3(A)
    assert not hyp(rep, "monotone").holds


def test_prop_basic3_rejects_wrong_slope():
    # (2, -1) is not normal to epi |x| at (1, 1); monotone against the rest
    A = FiniteOperator([((0, 0), (0, 0)), ((1, 1), (0, 0)), ((1, 1), (2, -1))], 2,
                       domain_rays=EPI_ABS_RAYS)
    rep = check_prop_basic3(A)
    assert rep.hypotheses_hold and rep.conclusion is False
    bad = [c for c in rep.certificates if not c["holds"]]
    assert bad[0]["xstar"] == vec(2) and bad[0]["min_grid_slack"] < 0


# -- Minty ------------------------------------------------------------------

def test_minty_examples():
    rep = minty_sample(SQUARE, [vec(5, 0), vec("1/2", "-1/3")])
    c0, c1 = rep.certificates
    assert c0["p"] == vec(1, 0) and c0["residual"] == vec(4, 0)
    assert c1["p"] == vec("1/2", "-1/3") and c1["residual"] == vec(0, 0)
    assert rep.conclusion


def test_minty_random_polytopes():
    rng = random.Random(8)
    for k in range(10):
        rep = minty_sample(random_polytope(rng), count=50, seed=k)
        assert rep.conclusion and len(rep.certificates) == 50


# -- rationalize --------------------------------------------------------------

SUPPLY = FiniteOperator([((0, 0), (0, 0)), ((0, 0), (1, 0)), ((1, 0), (1, 0))])


def test_rationalize_supply_example():
    rep = rationalize_supply(SUPPLY)
    assert rep.conclusion is True
    assert set(rep.certificates[0]["vertices"]) == {vec(0, 0), vec(1, 0)}
    assert all(c["gap"] == 0 for c in rep.certificates[1:])


def test_rationalize_law_of_supply_violation():
    T = FiniteOperator([((0,), (0,)), ((0,), (1,)), ((1,), (0,))])
    rep = rationalize_supply(T)
    assert isinstance(hyp(rep, "monotone").witness, MonotonicityViolation)
    assert rep.exit_code == EXIT_HYPOTHESIS


def test_rationalize_not_profit_maximal():
    # price (1,0): supply (0,0) is feasible in Y but (1,0) earns more
    T = FiniteOperator([((1, 0), (0, 0))])
    Y = VPolyhedron([(0, 0), (1, 0)])
    rep = rationalize_supply(T, Y)
    assert rep.hypotheses_hold and rep.conclusion is False
    gap = rep.certificates[-1]["gap"]
    assert gap == support_value(Y, vec(1, 0)) - 0 == 1
    assert rep.exit_code == EXIT_CONCLUSION


def test_rationalize_infeasible_supply():
    rep = rationalize_supply(FiniteOperator([((1,), (2,))]), VPolyhedron([(0,), (1,)]))
    assert not hyp(rep, "supplies_feasible").holds


def test_unbounded_production_set_reports_infinite_gap():
    rep = rationalize_supply(FiniteOperator([((1,), (0,))]), VPolyhedron([(0,)], [(1,)]))
    assert rep.conclusion is False and rep.certificates[-1]["gap"] == INF
