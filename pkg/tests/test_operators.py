import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monocert import (
    CycleViolation,
    FiniteOperator,
    MonotonicityViolation,
    RatVec,
    domain,
    evaluate,
    invert,
    is_cyclically_monotone,
    is_monotone,
    range_,
    rockafellar_potential,
    subdifferential,
    values_at,
    vec,
)
from monocert.errors import EmptyOperator, NotCyclicallyMonotone
from monocert.exactgeom import v_member
from monocert.instances import random_max_affine, subdifferential_operator
from monocert.operators import cycle_sum, longest_chains

from oracles import longest_chain_brute, simple_cycle_sums

ROTATION = FiniteOperator([((1, 0), (0, 1)), ((0, 1), (-1, 0)), ((-1, 0), (0, -1))])
IDENTITY = FiniteOperator([((0,), (0,)), ((1,), (1,)), ((2,), (2,))])

rats = st.fractions(min_value=-4, max_value=4, max_denominator=8)


@st.composite
def operators(draw, dim=None, max_pairs=5):
    d = dim or draw(st.integers(1, 2))
    n = draw(st.integers(1, max_pairs))
    vecs = st.lists(rats, min_size=d, max_size=d)
    return FiniteOperator([(draw(vecs), draw(vecs)) for _ in range(n)], d)


def test_domain_range_values():
    T = FiniteOperator([((0,), (0,)), ((0,), (1,))])
    assert domain(T) == [vec(0)]
    assert range_(T) == [vec(0), vec(1)]
    assert values_at(T, (0,)) == [vec(0), vec(1)]
    E = FiniteOperator([], dim=1)
    assert domain(E) == [] and range_(E) == []
    assert values_at(FiniteOperator([((1,), (2,))]), (0,)) == []


def test_duplicate_pairs_collapse():
    T = FiniteOperator([((1,), (2,)), ((1,), (2,)), ((1,), (3,))])
    assert len(T) == 2


def test_invert():
    assert invert(FiniteOperator([((1,), (2,))])).pairs == ((vec(2), vec(1)),)
    assert invert(FiniteOperator([], dim=1)).pairs == ()
    assert invert(invert(ROTATION)) == ROTATION


def test_is_monotone_examples():
    assert is_monotone(IDENTITY) is True
    v = is_monotone(FiniteOperator([((0,), (0,)), ((1,), (-1,))]))
    assert isinstance(v, MonotonicityViolation) and not v
    assert v.gap == -1 and v.recompute() == -1
    assert is_monotone(ROTATION) is True


def test_worst_violation_is_reported_first():
    T = FiniteOperator([((0,), (0,)), ((1,), (-1,)), ((2,), (-3,))])
    v = is_monotone(T)
    assert (v.i, v.j, v.gap) == (0, 2, -6)


def test_rotation_cycle_certificate():
    # oracle: every simple cycle's sum, enumerated
    sums = simple_cycle_sums(ROTATION.pairs)
    assert min(sums.values()) == -2
    assert sums[(0, 1, 2)] == -2
    v = is_cyclically_monotone(ROTATION)
    assert isinstance(v, CycleViolation)
    assert v.indices == (0, 1, 2)
    assert v.cycle_sum == -2 == v.recompute()


def test_identity_is_cyclically_monotone():
    assert min(simple_cycle_sums(IDENTITY.pairs).values()) >= 0
    assert is_cyclically_monotone(IDENTITY) is True


def test_single_pair_is_cyclically_monotone():
    assert is_cyclically_monotone(FiniteOperator([((3, 1), (-2, 5))])) is True


@settings(max_examples=150, deadline=None)
@given(operators())
def test_cyclic_verdict_matches_cycle_enumeration(T):
    sums = simple_cycle_sums(T.pairs)
    verdict = is_cyclically_monotone(T)
    if verdict is True:
        assert all(s >= 0 for s in sums.values())
    else:
        assert verdict.cycle_sum < 0
        assert verdict.recompute() == verdict.cycle_sum
        assert verdict.indices[0] == min(verdict.indices)
        assert len(set(verdict.indices)) == len(verdict.indices) >= 2
        assert any(s < 0 for s in sums.values())


@settings(max_examples=150, deadline=None)
@given(operators())
def test_cyclic_implies_monotone(T):
    if is_cyclically_monotone(T) is True:
        assert is_monotone(T) is True
    m = is_monotone(T)
    if m is not True:
        assert m.recompute() == m.gap < 0


@settings(max_examples=150, deadline=None)
@given(operators(dim=1, max_pairs=6))
def test_monotone_implies_cyclic_in_one_dimension(T):
    if is_monotone(T) is True:
        assert is_cyclically_monotone(T) is True


@settings(max_examples=100, deadline=None)
@given(operators())
def test_invert_preserves_monotonicity(T):
    assert (is_monotone(T) is True) == (is_monotone(invert(T)) is True)


def test_potential_examples():
    f = rockafellar_potential(FiniteOperator([((0,), (0,))]))
    assert f.pieces == ((vec(0), 0),)
    T = FiniteOperator([((0,), (0,)), ((1,), (1,))])
    g = rockafellar_potential(T)
    assert g.pieces == ((vec(0), 0), (vec(1), -1))
    # oracle: brute force over chains
    assert longest_chain_brute(T.pairs, 0, 1) == 0
    assert v_member(vec(0), subdifferential(g, (0,)))
    assert subdifferential(g, (1,)).vertices == (vec(0), vec(1))


def test_potential_errors():
    with pytest.raises(EmptyOperator):
        rockafellar_potential(FiniteOperator([], dim=1))
    with pytest.raises(NotCyclicallyMonotone) as exc:
        rockafellar_potential(ROTATION)
    assert exc.value.violation.cycle_sum == -2


def test_longest_chains_match_brute_force():
    rng = random.Random(11)
    for _ in range(30):
        f = random_max_affine(rng, dim=rng.randint(1, 2))
        T = subdifferential_operator(rng, f, 4)
        if len(T) > 6:
            continue
        phi = longest_chains(T, 0)
        for i in range(len(T)):
            assert phi[i] == longest_chain_brute(T.pairs, 0, i)


@pytest.mark.parametrize("seed", range(20))
def test_potential_contains_sampled_subdifferential(seed):
    rng = random.Random(seed)
    f0 = random_max_affine(rng)
    T = subdifferential_operator(rng, f0, rng.randint(1, 12))
    base = rng.randrange(len(T))
    g = rockafellar_potential(T, base)
    assert evaluate(g, T.pairs[base][0]) == 0
    for k, (x, xs) in enumerate(T.pairs):
        gx = evaluate(g, x)
        a, b = g.pieces[k]
        assert a == xs and Fraction(b) + sum(p * q for p, q in zip(a, x)) == gx
        assert v_member(xs, subdifferential(g, x))


def test_base_choice_changes_potential_beyond_a_constant():
    # Both bases give valid potentials, but a finite sample does not pin f
    # down: base 0 -> max(0, x - 1), base 1 -> max(-1, x - 1).
    T = FiniteOperator([((0,), (0,)), ((1,), (1,))])
    g0, g1 = rockafellar_potential(T, 0), rockafellar_potential(T, 1)
    assert g1.pieces == ((vec(0), -1), (vec(1), -1))
    assert evaluate(g0, (0,)) - evaluate(g1, (0,)) == 1
    assert evaluate(g0, (1,)) - evaluate(g1, (1,)) == 0
    for g in (g0, g1):
        assert all(v_member(xs, subdifferential(g, x)) for x, xs in T.pairs)


def test_cycle_sum_closes_the_loop():
    pairs = [(vec(1, 0), vec(0, 1)), (vec(0, 1), vec(-1, 0))]
    # <(1,-1),(0,1)> + <(-1,1),(-1,0)> = -1 + 1
    assert cycle_sum(pairs) == 0
