import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonsingular import bounds
from nonsingular.enumeration import (Evaluator, count_all, count_common_zeros,
                                     count_nonsingular_curve, count_singular, count_zeros,
                                     find_nonsingular, make_witness, self_check)
from nonsingular.errors import BudgetExceededError, InvariantViolation, PreconditionError
from nonsingular.field import make_field
from nonsingular.harness import enumerate_forms, random_form, random_poly
from nonsingular.poly import MPoly, evaluate, gradient, parse_poly

from oracles import brute_count

F3, F5, F7 = make_field(3), make_field(5), make_field(7)


def P(text, K, n=3):
    return parse_poly(text, K, n)


@pytest.mark.parametrize("q", [2, 3, 5, 7, 9])
def test_hyperplane_counts(q):
    K = make_field(*{9: (3, 2)}.get(q, (q, 1)))
    x0 = MPoly.variable(K, 3, 0)
    assert count_zeros(x0).N_affine == q * q
    assert count_zeros(x0, "projective").N_projective == q + 1
    assert count_zeros(x0).N_affine <= bounds.hypersurface_upper(1, 3, q)


def test_smooth_conic():
    F = P("x0*x2 - x1^2", F5)
    assert count_zeros(F, "projective").N_projective == 6
    rep = count_all(F)
    assert rep.N_affine == 25 and rep.S1 == 1


def test_singular_counts():
    assert count_singular(P("x0*x1 - x2^2", F5)) == 1
    assert count_singular(P("x0^2 + 2*x0*x1 + x1^2", F3, 2)) == 3
    assert count_singular(P("x0", F7, 2)) == 0


def test_common_zero_counts():
    for K in (F3, F5, F7):
        q = K.q
        assert count_common_zeros(P("x0", K), P("x1", K)) == q
        assert count_common_zeros(P("x0", K, 2), P("x0", K, 2)) == q
    # x0 = 0 forces x1 = 0, leaving the q points (0, 0, t)
    assert count_common_zeros(P("x0*x2 - x1^2", F5), P("x0", F5)) == 5


def test_find_nonsingular_examples():
    w = find_nonsingular(P("x0^2 + x1^2 + x2^2", F3))
    assert w is not None and w.verify(P("x0^2 + x1^2 + x2^2", F3))
    assert [c.value for c in w.point] == [1, 1, 1]
    assert [g.value for g in w.gradient_at_point] == [2, 2, 2]
    assert find_nonsingular(P("x0^2 + 2*x0*x1 + x1^2", F3, 2)) is None
    G, H = P("x0*x2 - x1^2", F5), P("x2", F5)
    w = find_nonsingular(G, H)
    assert w is not None and w.point[2] != 0 and w.verify(G, H)


def test_witness_rejects_bad_points():
    G = P("x0*x2 - x1^2", F5)
    with pytest.raises(InvariantViolation):
        make_witness(G, (0, 0, 0))  # singular origin
    with pytest.raises(InvariantViolation):
        make_witness(G, (1, 1, 2))  # not a zero


def test_curve_counts():
    assert count_nonsingular_curve(P("x1 - x0^2", F7, 2), "affine") == 7
    assert count_nonsingular_curve(P("x1^2 - x0^3", F7, 2), "affine") == 6
    assert count_nonsingular_curve(P("x0", F7, 2), "affine") == 7
    # smooth conics have q + 1 non-singular projective points
    assert count_nonsingular_curve(P("x0*x1 - 1", F5, 2), "projective") == 6
    assert count_nonsingular_curve(P("x0", F7, 2), "projective") == 8


def test_smooth_conics_exhaustive_q5():
    # every ternary form of degree 2 over F_5 with no singular projective point
    seen = 0
    for F in enumerate_forms(F5, 3, 2, normalized=True):
        rep = count_all(F)
        if rep.S1 == 1:
            seen += 1
            assert rep.N_projective == 6 == bounds.leep_yeomans_lower(2, 5)
    assert seen == (5**3 - 1) * 5**2  # nondegenerate forms up to scalars


@pytest.mark.parametrize("K,n,d", [(F3, 3, 2), (F5, 3, 3), (F7, 2, 4), (make_field(2, 2), 3, 2),
                                   (make_field(3, 2), 2, 3)])
def test_euler_relation_and_self_check(K, n, d):
    rng = np.random.default_rng(K.q + d)
    for _ in range(10):
        F = random_form(K, n, d, rng)
        rep = count_all(F)
        assert rep.N_affine == (K.q - 1) * rep.N_projective + 1
        assert rep.N_affine <= bounds.hypersurface_upper(d, n, K.q)
        assert self_check(F, samples=32)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32))
def test_counts_match_brute_force(q, n, d, seed):
    K = make_field(q)
    F = random_poly(K, n, d, np.random.default_rng(seed))
    assert count_zeros(F).N_affine == brute_count(dict(F._terms), q, n)


def test_extension_field_counts_by_scalar_evaluation():
    K = make_field(2, 2)
    F = random_form(K, 3, 3, np.random.default_rng(3))
    direct = sum(evaluate(F, pt).is_zero() for pt in itertools.product(K.elements(), repeat=3))
    assert count_zeros(F).N_affine == direct


def test_threads_bit_identical():
    K = make_field(31)
    rng = np.random.default_rng(1)
    for _ in range(3):
        G, H = random_form(K, 3, 3, rng), random_form(K, 3, 1, rng)
        one = count_all(G, H, threads=1)
        four = count_all(G, H, threads=4)
        assert one.to_dict(timing=False) == four.to_dict(timing=False)
        assert find_nonsingular(G, H, threads=1).to_dict() == find_nonsingular(G, H, threads=4).to_dict()


def test_start_seed_witness_verifies():
    G = P("x0*x2 - x1^2", F7)
    w = find_nonsingular(G, start_seed=9)
    assert w.verify(G)


def test_budget():
    F = P("x0*x2 - x1^2", F7)
    with pytest.raises(BudgetExceededError):
        count_zeros(F, budget_evals=100)
    with pytest.raises(PreconditionError):
        count_zeros(P("x0 + 1", F7), "projective")


def test_evaluator_matches_scalar():
    K = make_field(5, 2)
    F = random_poly(K, 2, 3, np.random.default_rng(4))
    axis = np.arange(K.q, dtype=np.int64)
    grid = Evaluator(F)([axis, axis])
    for a in range(K.q):
        for b in range(K.q):
            assert grid[a, b] == evaluate(F, (K.element(a), K.element(b))).value


def test_witness_gradient_and_point_bound():
    K = make_field(11)
    rng = np.random.default_rng(8)
    for _ in range(5):
        G = random_form(K, 3, 2, rng)
        rep = count_all(G)
        w = find_nonsingular(G)
        if w is not None:
            assert any(not g.is_zero() for g in gradient(G).at(w.point))
        assert rep.N_affine <= bounds.hypersurface_upper(2, 3, 11)
